"""Smooth functions with exact derivatives: polynomials, bump windows, test functions.

Every function object here exposes the same small surface used by the
pairing and STFT code:

* ``f(T)`` for an (n, d) node array,
* ``f.derivative(alpha, T)`` for a multi-index ``alpha``,
* ``f.box`` -- a box (lo, hi) containing the (effective) support.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

__all__ = [
    "multi_indices",
    "binom_multi",
    "Poly",
    "Window",
    "TiltedWindow",
    "SchwartzTestFunction",
    "profile_derivative",
    "profile_sup",
]


def multi_indices(d: int, n: int) -> list[tuple[int, ...]]:
    """All multi-indices alpha in N^d with |alpha| <= n, graded order."""
    out = []
    for total in range(n + 1):
        for alpha in itertools.product(range(total + 1), repeat=d):
            if sum(alpha) == total:
                out.append(alpha)
    return out


def sub_indices(alpha: tuple[int, ...]):
    """Every beta <= alpha (componentwise)."""
    return itertools.product(*[range(a + 1) for a in alpha])


def binom_multi(alpha, beta) -> int:
    return math.prod(math.comb(a, b) for a, b in zip(alpha, beta))


def _power(v: np.ndarray, alpha) -> np.ndarray:
    """v^alpha for v of shape (..., d)."""
    out = np.ones(v.shape[:-1], dtype=np.result_type(v, float))
    for i, a in enumerate(alpha):
        if a:
            out = out * v[..., i] ** a
    return out


# --------------------------------------------------------------------------
# polynomials


class Poly:
    """Polynomial in d variables with complex coefficients, stored sparsely."""

    def __init__(self, terms: dict | None = None, dim: int = 1):
        self.dim = int(dim)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != self.dim or min(e, default=0) < 0:
                raise ValueError(f"bad exponent {e} for dimension {self.dim}")
            c = complex(c)
            if c != 0:
                clean[e] = clean.get(e, 0) + c
        self.terms = {e: c for e, c in clean.items() if c != 0}

    @classmethod
    def constant(cls, c, dim: int = 1) -> "Poly":
        return cls({(0,) * dim: c}, dim)

    @classmethod
    def coordinate(cls, i: int, dim: int) -> "Poly":
        e = [0] * dim
        e[i] = 1
        return cls({tuple(e): 1.0}, dim)

    @classmethod
    def from_json(cls, obj, dim: int) -> "Poly":
        if obj is None:
            return cls.constant(1.0, dim)
        if isinstance(obj, (int, float)):
            return cls.constant(obj, dim)
        if isinstance(obj, list):  # 1-d coefficient list c0 + c1 t + ...
            if dim != 1:
                raise ValueError("coefficient-list polynomials are one-dimensional")
            return cls({(k,): c for k, c in enumerate(obj)}, 1)
        terms = {tuple(e): complex(*c) if isinstance(c, list) else c for e, c in obj["terms"]}
        return cls(terms, dim)

    def to_json(self):
        def enc(c):
            return c.real if c.imag == 0 else [c.real, c.imag]

        return {"terms": [[list(e), enc(c)] for e, c in sorted(self.terms.items())]}

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_real(self) -> bool:
        return all(c.imag == 0 for c in self.terms.values())

    def __call__(self, T) -> np.ndarray:
        T = np.atleast_2d(np.asarray(T, dtype=float))
        if not self.terms:
            return np.zeros(T.shape[0])
        out = np.zeros(T.shape[0], dtype=complex)
        for e, c in self.terms.items():
            out += c * _power(T, e)
        return out.real if self.is_real else out

    def __add__(self, other):
        other = other if isinstance(other, Poly) else Poly.constant(other, self.dim)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Poly(terms, self.dim)

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else -other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly({e: c * other for e, c in self.terms.items()}, self.dim)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Poly(terms, self.dim)

    __rmul__ = __mul__

    def partial(self, i: int) -> "Poly":
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                terms[tuple(e2)] = c * e[i]
        return Poly(terms, self.dim)

    def derivative(self, alpha) -> "Poly":
        p = self
        for i, a in enumerate(alpha):
            for _ in range(a):
                p = p.partial(i)
        return p

    def shift(self, h) -> "Poly":
        """The polynomial t -> p(t - h)."""
        h = np.atleast_1d(np.asarray(h, dtype=float))
        lin = [Poly.coordinate(i, self.dim) - h[i] for i in range(self.dim)]
        out = Poly({}, self.dim)
        for e, c in self.terms.items():
            term = Poly.constant(c, self.dim)
            for i, k in enumerate(e):
                for _ in range(k):
                    term = term * lin[i]
            out = out + term
        return out

    def __repr__(self):
        return f"Poly({self.terms}, dim={self.dim})"


# --------------------------------------------------------------------------
# bump windows


@functools.lru_cache(maxsize=None)
def _profile_numerator(k: int) -> Polynomial:
    """Q_k with d^k/du^k exp(-1/(1-u^2)) = Q_k(u) (1-u^2)^(-2k) exp(-1/(1-u^2))."""
    if k == 0:
        return Polynomial([1.0])
    Q = _profile_numerator(k - 1)
    j = k - 1
    one_minus = Polynomial([1.0, 0.0, -1.0])
    u = Polynomial([0.0, 1.0])
    return Q.deriv() * one_minus**2 + 4 * j * u * one_minus * Q - 2 * u * Q


def profile_derivative(k: int, u) -> np.ndarray:
    """k-th derivative of the 1-d bump u -> exp(-1/(1-u^2)) on (-1, 1), zero outside."""
    u = np.asarray(u, dtype=float)
    w = 1.0 - u * u
    out = np.zeros_like(u)
    inside = w > 0
    wi = w[inside]
    with np.errstate(under="ignore"):
        out[inside] = _profile_numerator(k)(u[inside]) * np.exp(-1.0 / wi - 2 * k * np.log(wi))
    return out


@functools.lru_cache(maxsize=None)
def profile_sup(k: int, grid: int = 4096) -> float:
    """sup |profile^(k)| by a dense grid search refined by a bounded 1-d optimiser."""
    from scipy.optimize import minimize_scalar

    u = np.linspace(-1, 1, grid + 2)[1:-1]
    vals = np.abs(profile_derivative(k, u))
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo, hi = u[max(i - 1, 0)], u[min(i + 1, u.size - 1)]
    if hi > lo:
        res = minimize_scalar(lambda s: -abs(float(profile_derivative(k, np.array([s]))[0])), bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
        best = max(best, -float(res.fun))
    return best


@dataclass(frozen=True)
class Window:
    """Tensor bump psi(t) = amplitude * prod_i profile((t_i - center_i) / radius).

    The support is the closed box of half-width ``radius``; the smallest
    centred ball containing it has radius ``radius * sqrt(d)``.
    """

    radius: float = 1.0
    dim: int = 1
    amplitude: float = 1.0
    center: tuple = ()

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("window radius must be > 0")
        if self.dim not in (1, 2, 3):
            raise ValueError("window dimension must be 1, 2 or 3")
        if self.amplitude == 0 or not np.isfinite(self.amplitude):
            raise ValueError("window amplitude must be finite and non-zero")
        c = tuple(float(v) for v in self.center) if self.center else (0.0,) * self.dim
        if len(c) != self.dim:
            raise ValueError("center has the wrong dimension")
        object.__setattr__(self, "center", c)

    @property
    def support_radius(self) -> float:
        return self.radius * math.sqrt(self.dim)

    @property
    def box(self) -> tuple[np.ndarray, np.ndarray]:
        c = np.array(self.center)
        return c - self.radius, c + self.radius

    def derivative(self, alpha, T) -> np.ndarray:
        T = np.atleast_2d(np.asarray(T, dtype=float))
        U = (T - np.array(self.center)) / self.radius
        out = np.full(T.shape[0], float(self.amplitude))
        for i, a in enumerate(alpha):
            out = out * profile_derivative(a, U[:, i]) / self.radius**a
        return out

    def __call__(self, T) -> np.ndarray:
        return self.derivative((0,) * self.dim, T)

    def sup_norm(self, alpha) -> float:
        return abs(self.amplitude) * math.prod(profile_sup(a) / self.radius**a for a in alpha)

    def max_sup_norm(self, n: int) -> float:
        """max over |alpha| <= n of sup |d^alpha psi|."""
        return max(self.sup_norm(a) for a in multi_indices(self.dim, n))

    def conj(self) -> "Window":
        return self

    def scaled(self, c: float) -> "Window":
        return Window(self.radius, self.dim, self.amplitude * c, self.center)

    def to_json(self) -> dict:
        return {"type": "bump", "radius": self.radius, "dim": self.dim, "amplitude": self.amplitude, "center": list(self.center)}


@dataclass(frozen=True)
class TiltedWindow:
    """s -> exp(tau . s) * base(s), with Leibniz-rule derivatives."""

    base: Window
    tau: tuple

    def __post_init__(self):
        object.__setattr__(self, "tau", tuple(float(v) for v in np.atleast_1d(self.tau)))

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def box(self):
        return self.base.box

    def derivative(self, alpha, T) -> np.ndarray:
        T = np.atleast_2d(np.asarray(T, dtype=float))
        tau = np.array(self.tau)
        out = np.zeros(T.shape[0])
        for beta in sub_indices(alpha):
            rest = tuple(a - b for a, b in zip(alpha, beta))
            out += binom_multi(alpha, beta) * _power(tau, rest) * self.base.derivative(beta, T)
        return out * np.exp(T @ tau)

    def __call__(self, T) -> np.ndarray:
        return self.derivative((0,) * self.dim, T)

    def conj(self) -> "TiltedWindow":
        return self


# --------------------------------------------------------------------------
# Schwartz test functions


class SchwartzTestFunction:
    """phi(t) = p(t) exp(-sigma |t|^2 - eta . t), optionally times a bump window.

    ``sigma`` may be zero only when a bump factor supplies compact support.
    Derivatives are exact: d^alpha (p e^q) = P_alpha e^q with P_alpha built
    by the recursion P_{alpha+e_i} = d_i P_alpha + P_alpha d_i q.
    """

    def __init__(self, poly: Poly | None = None, sigma: float = 1.0, eta=None, bump: Window | None = None, dim: int | None = None):
        if dim is None:
            dim = poly.dim if poly is not None else (bump.dim if bump is not None else 1)
        self.dim = dim
        self.poly = poly if poly is not None else Poly.constant(1.0, dim)
        if self.poly.dim != dim:
            raise ValueError("polynomial dimension mismatch")
        self.sigma = float(sigma)
        self.eta = np.zeros(dim) if eta is None else np.atleast_1d(np.asarray(eta, dtype=float)).copy()
        self.bump = bump
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.sigma == 0 and bump is None:
            raise ValueError("sigma = 0 requires a compactly supported bump factor")
        if bump is not None and bump.dim != dim:
            raise ValueError("bump dimension mismatch")
        self._cache: dict = {(0,) * dim: self.poly}

    # -- structure
    def _dq(self, i: int) -> Poly:
        return Poly.coordinate(i, self.dim) * (-2 * self.sigma) - self.eta[i]

    def _p_alpha(self, alpha) -> Poly:
        alpha = tuple(alpha)
        if alpha not in self._cache:
            i = max(k for k, a in enumerate(alpha) if a)
            prev = list(alpha)
            prev[i] -= 1
            P = self._p_alpha(tuple(prev))
            self._cache[alpha] = P.partial(i) + P * self._dq(i)
        return self._cache[alpha]

    def _exp_part(self, T) -> np.ndarray:
        return np.exp(-self.sigma * np.sum(T * T, axis=1) - T @ self.eta)

    def _smooth_derivative(self, alpha, T) -> np.ndarray:
        return self._p_alpha(alpha)(T) * self._exp_part(T)

    def derivative(self, alpha, T) -> np.ndarray:
        T = np.atleast_2d(np.asarray(T, dtype=float))
        if self.bump is None:
            return self._smooth_derivative(alpha, T)
        out = 0
        for beta in sub_indices(alpha):
            rest = tuple(a - b for a, b in zip(alpha, beta))
            out = out + binom_multi(alpha, beta) * self._smooth_derivative(beta, T) * self.bump.derivative(rest, T)
        return out

    def __call__(self, T) -> np.ndarray:
        return self.derivative((0,) * self.dim, T)

    # -- support
    def box_for(self, rate=None, degree: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """A box outside which |phi| times exp(rate . t) (1+|t|)^degree is negligible.

        Negligible means below exp(-42) (about 6e-19) times its peak.
        """
        if self.bump is not None:
            return self.bump.box
        lin = -self.eta + (0 if rate is None else np.asarray(rate, dtype=float))
        mid = lin / (2 * self.sigma)
        growth = self.poly.degree + degree + 4
        R = 1.0
        while self.sigma * R * R - growth * math.log1p(np.linalg.norm(mid) + R) < 42.0:
            R *= 1.25
        return mid - R, mid + R

    @property
    def box(self):
        return self.box_for()

    # -- algebra
    def reweighted(self, eta) -> "SchwartzTestFunction":
        """t -> exp(-eta . t) phi(t)."""
        return SchwartzTestFunction(self.poly, self.sigma, self.eta + np.asarray(eta, dtype=float), self.bump, self.dim)

    def scaled(self, c) -> "SchwartzTestFunction":
        return SchwartzTestFunction(self.poly * c, self.sigma, self.eta, self.bump, self.dim)

    def conj(self) -> "SchwartzTestFunction":
        p = Poly({e: c.conjugate() for e, c in self.poly.terms.items()}, self.dim)
        return SchwartzTestFunction(p, self.sigma, self.eta, self.bump, self.dim)

    def to_json(self) -> dict:
        return {
            "type": "schwartz",
            "dim": self.dim,
            "poly": self.poly.to_json(),
            "sigma": self.sigma,
            "eta": self.eta.tolist(),
            "bump": None if self.bump is None else self.bump.to_json(),
        }

    def __repr__(self):
        return f"SchwartzTestFunction(poly={self.poly!r}, sigma={self.sigma}, eta={self.eta.tolist()}, bump={self.bump!r})"


def function_from_json(obj: dict):
    kind = obj.get("type", "bump")
    if kind == "bump":
        return Window(obj.get("radius", 1.0), obj.get("dim", 1), obj.get("amplitude", 1.0), tuple(obj.get("center", ())))
    if kind == "schwartz":
        d = obj.get("dim", 1)
        bump = function_from_json(obj["bump"]) if obj.get("bump") else None
        return SchwartzTestFunction(Poly.from_json(obj.get("poly"), d), obj.get("sigma", 1.0), obj.get("eta"), bump, d)
    raise ValueError(f"unknown function type {kind!r}")

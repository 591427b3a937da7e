"""Symbolic testbed of Laplace transformable distributions.

A :class:`TestDistribution` is a finite sum of terms drawn from a small
grammar. Each term knows how to pair itself with a smooth function, how to
absorb an exponential factor ``exp(-eta . t)`` and a translation, and which
open convex region of exponents ``eta`` keeps ``exp(-eta . t) f`` tempered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .convex import FullSpace, HRegion, intersect_regions
from .functions import Poly, _power, binom_multi, sub_indices
from .quadrature import QuadSpec, integrate_box

__all__ = [
    "DeltaDeriv",
    "ExpPolyOrthant",
    "GaussPoly",
    "FunctionTerm",
    "TestDistribution",
    "distribution_from_json",
    "delta",
    "heaviside_exp",
    "gaussian",
]

_NEGLIGIBLE = 42.0  # log of the relative size treated as zero when truncating Gaussian tails


def _vec(a, d=None) -> np.ndarray:
    v = np.atleast_1d(np.asarray(a, dtype=float)).copy()
    if d is not None and v.size != d:
        raise ValueError(f"expected a vector of length {d}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def _complex_json(c: complex):
    return c.real if c.imag == 0 else [c.real, c.imag]


def _complex_from_json(obj) -> complex:
    return complex(*obj) if isinstance(obj, list) else complex(obj)


@dataclass(frozen=True, eq=False)
class DeltaDeriv:
    """c * d^alpha delta_a, acting by g -> (-1)^|alpha| c d^alpha g(a)."""

    a: np.ndarray
    alpha: tuple
    coeff: complex = 1.0

    kind = "delta"

    def __post_init__(self):
        object.__setattr__(self, "a", _vec(self.a))
        object.__setattr__(self, "alpha", tuple(int(k) for k in self.alpha) or (0,) * self.a.size)
        object.__setattr__(self, "coeff", complex(self.coeff))
        if len(self.alpha) != self.a.size or min(self.alpha) < 0:
            raise ValueError("alpha must be a multi-index of the point's dimension")

    @property
    def dim(self) -> int:
        return self.a.size

    @property
    def order(self) -> int:
        return sum(self.alpha)

    def region(self):
        return FullSpace(self.dim)

    def pair(self, g) -> complex:
        """Pair with ``g``, any object exposing ``derivative(alpha, T)``."""
        val = np.asarray(g.derivative(self.alpha, self.a[None, :]))[0]
        return (-1) ** self.order * self.coeff * val

    def reweighted(self, eta) -> list:
        eta = _vec(eta, self.dim)
        scale = math.exp(-float(eta @ self.a))
        out = []
        for beta in sub_indices(self.alpha):
            rest = tuple(a - b for a, b in zip(self.alpha, beta))
            c = self.coeff * binom_multi(self.alpha, beta) * float(_power(eta, rest)) * scale
            if c != 0:
                out.append(DeltaDeriv(self.a, beta, c))
        return out

    def translated(self, h) -> list:
        return [DeltaDeriv(self.a + _vec(h, self.dim), self.alpha, self.coeff)]

    def scaled(self, c) -> "DeltaDeriv":
        return DeltaDeriv(self.a, self.alpha, self.coeff * c)

    def to_json(self) -> dict:
        return {"type": "delta", "a": self.a.tolist(), "alpha": list(self.alpha), "coeff": _complex_json(self.coeff)}


@dataclass(frozen=True, eq=False)
class ExpPolyOrthant:
    """Density c * p(t) * exp(mu . t) on the orthant {t >= corner}."""

    mu: np.ndarray
    poly: Poly
    corner: np.ndarray = None
    coeff: complex = 1.0

    kind = "density"

    def __post_init__(self):
        mu = _vec(self.mu)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "corner", np.zeros(mu.size) if self.corner is None else _vec(self.corner, mu.size))
        object.__setattr__(self, "coeff", complex(self.coeff))
        if self.poly.dim != mu.size:
            raise ValueError("polynomial dimension mismatch")

    @property
    def dim(self) -> int:
        return self.mu.size

    def region(self):
        # exp(-eta . t) f is tempered iff eta_i > mu_i for every i
        return HRegion(-np.eye(self.dim), -self.mu)

    def density(self, T) -> np.ndarray:
        T = np.atleast_2d(T)
        inside = np.all(T >= self.corner, axis=1)
        with np.errstate(over="ignore"):
            val = self.coeff * self.poly(T) * np.exp(T @ self.mu)
        return np.where(inside, val, 0.0)

    def clip_box(self, lo, hi):
        lo = np.maximum(lo, self.corner)
        return (lo, hi) if np.all(hi > lo) else None

    def reweighted(self, eta) -> list:
        return [ExpPolyOrthant(self.mu - _vec(eta, self.dim), self.poly, self.corner, self.coeff)]

    def translated(self, h) -> list:
        h = _vec(h, self.dim)
        c = self.coeff * math.exp(-float(self.mu @ h))
        return [ExpPolyOrthant(self.mu, self.poly.shift(h), self.corner + h, c)]

    def scaled(self, c) -> "ExpPolyOrthant":
        return ExpPolyOrthant(self.mu, self.poly, self.corner, self.coeff * c)

    def to_json(self) -> dict:
        return {
            "type": "exp_orthant",
            "mu": self.mu.tolist(),
            "poly": self.poly.to_json(),
            "corner": self.corner.tolist(),
            "coeff": _complex_json(self.coeff),
        }


@dataclass(frozen=True, eq=False)
class GaussPoly:
    """Density c * p(t) * exp(-|t - center|^2 / (2 sigma^2))."""

    sigma: float
    poly: Poly
    coeff: complex = 1.0
    center: np.ndarray = None

    kind = "density"

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        d = self.poly.dim
        object.__setattr__(self, "center", np.zeros(d) if self.center is None else _vec(self.center, d))
        object.__setattr__(self, "coeff", complex(self.coeff))

    @property
    def dim(self) -> int:
        return self.poly.dim

    def region(self):
        return FullSpace(self.dim)

    def density(self, T) -> np.ndarray:
        T = np.atleast_2d(T)
        r2 = np.sum((T - self.center) ** 2, axis=1)
        return self.coeff * self.poly(T) * np.exp(-r2 / (2 * self.sigma**2))

    def effective_radius(self) -> float:
        """Radius beyond which the density is below exp(-42) of its scale."""
        deg = self.poly.degree
        R = self.sigma
        while R * R / (2 * self.sigma**2) - deg * math.log1p(R + np.linalg.norm(self.center)) < _NEGLIGIBLE:
            R *= 1.2
        return R

    def clip_box(self, lo, hi):
        R = self.effective_radius()
        lo = np.maximum(lo, self.center - R)
        hi = np.minimum(hi, self.center + R)
        return (lo, hi) if np.all(hi > lo) else None

    def reweighted(self, eta) -> list:
        eta = _vec(eta, self.dim)
        s2 = self.sigma**2
        m2 = self.center - s2 * eta
        c = self.coeff * math.exp((m2 @ m2 - self.center @ self.center) / (2 * s2))
        return [GaussPoly(self.sigma, self.poly, c, m2)]

    def translated(self, h) -> list:
        h = _vec(h, self.dim)
        return [GaussPoly(self.sigma, self.poly.shift(h), self.coeff, self.center + h)]

    def scaled(self, c) -> "GaussPoly":
        return GaussPoly(self.sigma, self.poly, self.coeff * c, self.center)

    def to_json(self) -> dict:
        return {
            "type": "gauss",
            "sigma": self.sigma,
            "poly": self.poly.to_json(),
            "coeff": _complex_json(self.coeff),
            "center": self.center.tolist(),
        }


@dataclass(frozen=True, eq=False)
class FunctionTerm:
    """A smooth function viewed as a regular distribution (used for adjoint pairings)."""

    func: object
    coeff: complex = 1.0

    kind = "density"

    @property
    def dim(self) -> int:
        return self.func.dim

    def region(self):
        return FullSpace(self.dim)

    def density(self, T) -> np.ndarray:
        return self.coeff * self.func(np.atleast_2d(T))

    def clip_box(self, lo, hi):
        flo, fhi = self.func.box
        lo, hi = np.maximum(lo, flo), np.minimum(hi, fhi)
        return (lo, hi) if np.all(hi > lo) else None

    def reweighted(self, eta) -> list:
        if not hasattr(self.func, "reweighted"):
            raise TypeError("this function term does not support exponential reweighting")
        return [FunctionTerm(self.func.reweighted(eta), self.coeff)]

    def translated(self, h) -> list:
        raise TypeError("function terms are not translatable")

    def scaled(self, c) -> "FunctionTerm":
        return FunctionTerm(self.func, self.coeff * c)

    def to_json(self) -> dict:
        return {"type": "function", "func": self.func.to_json(), "coeff": _complex_json(self.coeff)}


@dataclass(frozen=True, eq=False)
class TestDistribution:
    """Finite sum of testbed terms on R^d."""

    terms: tuple = ()
    dim: int = 1
    label: str = field(default="", compare=False)

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(t for t in self.terms if t.coeff != 0))
        for t in self.terms:
            if t.dim != self.dim:
                raise ValueError("term dimension does not match the distribution")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def max_order(self) -> int:
        return max((t.order for t in self.terms if t.kind == "delta"), default=0)

    def region(self):
        """The open convex set of eta with exp(-eta . t) f tempered."""
        return intersect_regions([t.region() for t in self.terms], self.dim)

    def reweighted(self, eta) -> "TestDistribution":
        return TestDistribution(tuple(s for t in self.terms for s in t.reweighted(eta)), self.dim, self.label)

    def translated(self, h) -> "TestDistribution":
        return TestDistribution(tuple(s for t in self.terms for s in t.translated(h)), self.dim, self.label)

    def scaled(self, c) -> "TestDistribution":
        return TestDistribution(tuple(t.scaled(c) for t in self.terms), self.dim, self.label)

    def __add__(self, other: "TestDistribution") -> "TestDistribution":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return TestDistribution(self.terms + other.terms, self.dim)

    def is_l2(self) -> bool:
        return all(isinstance(t, GaussPoly) for t in self.terms)

    def l2_norm_sq(self, quad: QuadSpec = QuadSpec()) -> float:
        if not self.is_l2():
            raise ValueError("only Gaussian-polynomial terms define an L2 function")
        if self.is_zero:
            return 0.0
        boxes = [t.clip_box(np.full(self.dim, -np.inf), np.full(self.dim, np.inf)) for t in self.terms]
        lo = np.min([b[0] for b in boxes], axis=0)
        hi = np.max([b[1] for b in boxes], axis=0)
        return float(integrate_box(lambda T: np.abs(sum(t.density(T) for t in self.terms)) ** 2, lo, hi, quad))

    def to_json(self) -> dict:
        out = {"dim": self.dim, "terms": [t.to_json() for t in self.terms]}
        if self.label:
            out["label"] = self.label
        return out


# --------------------------------------------------------------------------
# constructors and JSON


def delta(a=0.0, alpha=None, coeff=1.0) -> TestDistribution:
    a = _vec(a)
    return TestDistribution((DeltaDeriv(a, alpha or (0,) * a.size, coeff),), a.size)


def heaviside_exp(mu, coeff=1.0, poly: Poly | None = None, corner=None) -> TestDistribution:
    """H(t) exp(mu . t) p(t) on the orthant starting at ``corner``."""
    mu = _vec(mu)
    poly = poly or Poly.constant(1.0, mu.size)
    return TestDistribution((ExpPolyOrthant(mu, poly, corner, coeff),), mu.size)


def gaussian(sigma=1.0, dim=1, coeff=1.0, poly: Poly | None = None, center=None) -> TestDistribution:
    poly = poly or Poly.constant(1.0, dim)
    return TestDistribution((GaussPoly(sigma, poly, coeff, center),), dim)


def term_from_json(obj: dict, dim: int):
    kind = obj.get("type")
    coeff = _complex_from_json(obj.get("coeff", 1.0))
    if kind == "delta":
        return DeltaDeriv(obj.get("a", [0.0] * dim), tuple(obj.get("alpha", [0] * dim)), coeff)
    if kind == "exp_orthant":
        return ExpPolyOrthant(obj["mu"], Poly.from_json(obj.get("poly"), dim), obj.get("corner"), coeff)
    if kind == "gauss":
        return GaussPoly(obj.get("sigma", 1.0), Poly.from_json(obj.get("poly"), dim), coeff, obj.get("center"))
    raise ValueError(f"unknown term type {kind!r}")


def distribution_from_json(obj: dict) -> TestDistribution:
    dim = int(obj.get("dim", 1))
    terms = tuple(term_from_json(t, dim) for t in obj.get("terms", []))
    return TestDistribution(terms, dim, obj.get("label", ""))

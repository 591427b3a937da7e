"""Short-time Fourier transform of testbed distributions, its adjoint, and checks.

Conventions: ``V_psi f(x, xi) = <f, conj(psi(t - x)) exp(-2 pi i xi . t)>`` with
the bilinear bracket; the adjoint acts weakly by
``<V*_psi F, phi> = iint F(x, xi) V_{conj psi} phi(x, -xi) dx dxi``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace

import numpy as np

from .distributions import FunctionTerm, TestDistribution
from .functions import binom_multi, sub_indices
from .quadrature import QuadSpec, integrate_box, trapezoid_weights

__all__ = [
    "GridSpec",
    "TimeFrequencyField",
    "GridTooSmall",
    "SynthesisWindowError",
    "pairing",
    "stft",
    "stft_row",
    "adjoint_apply",
    "window_inner",
    "reconstruct_error",
    "isometry_gap",
    "convolve",
    "DEFAULT_GRID",
    "ISOMETRY_GRID",
]


class GridTooSmall(RuntimeError):
    def __init__(self, tail_fraction: float):
        super().__init__(f"grid too small: sampled tail fraction {tail_fraction:.3e}")
        self.tail_fraction = tail_fraction


class SynthesisWindowError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Rectangular (x, xi) grid with inclusive, equally spaced nodes per axis."""

    x_min: tuple
    x_max: tuple
    xi_min: tuple
    xi_max: tuple
    n_x: int
    n_xi: int

    def __post_init__(self):
        for name in ("x_min", "x_max", "xi_min", "xi_max"):
            object.__setattr__(self, name, tuple(float(v) for v in np.atleast_1d(getattr(self, name))))
        d = len(self.x_min)
        if not (len(self.x_max) == len(self.xi_min) == len(self.xi_max) == d):
            raise ValueError("grid bounds disagree in dimension")
        if self.n_x < 2 or self.n_xi < 2:
            raise ValueError("each axis needs at least two nodes")
        if any(b <= a for a, b in zip(self.x_min + self.xi_min, self.x_max + self.xi_max)):
            raise ValueError("grid bounds must be strictly increasing")

    @classmethod
    def symmetric(cls, x_half: float, xi_half: float, n_x: int, n_xi: int, dim: int = 1) -> "GridSpec":
        return cls((-x_half,) * dim, (x_half,) * dim, (-xi_half,) * dim, (xi_half,) * dim, n_x, n_xi)

    @property
    def dim(self) -> int:
        return len(self.x_min)

    def x_axes(self) -> list[np.ndarray]:
        return [np.linspace(a, b, self.n_x) for a, b in zip(self.x_min, self.x_max)]

    def xi_axes(self) -> list[np.ndarray]:
        return [np.linspace(a, b, self.n_xi) for a, b in zip(self.xi_min, self.xi_max)]

    @staticmethod
    def _mesh(axes) -> np.ndarray:
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def x_nodes(self) -> np.ndarray:
        return self._mesh(self.x_axes())

    def xi_nodes(self) -> np.ndarray:
        return self._mesh(self.xi_axes())

    def weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Tensor trapezoid weights for x nodes and xi nodes."""

        def tensor(axes):
            ws = np.meshgrid(*[trapezoid_weights(a) for a in axes], indexing="ij")
            return np.prod(np.stack([w.ravel() for w in ws], axis=1), axis=1)

        return tensor(self.x_axes()), tensor(self.xi_axes())

    @property
    def size(self) -> int:
        return self.n_x**self.dim * self.n_xi**self.dim

    def refined(self, grow: float = 1.5) -> "GridSpec":
        """Halve both steps and stretch both ranges by ``grow`` about their centres."""

        def stretch(lo, hi):
            c = [(a + b) / 2 for a, b in zip(lo, hi)]
            h = [(b - a) / 2 * grow for a, b in zip(lo, hi)]
            return tuple(ci - hi_ for ci, hi_ in zip(c, h)), tuple(ci + hi_ for ci, hi_ in zip(c, h))

        xlo, xhi = stretch(self.x_min, self.x_max)
        klo, khi = stretch(self.xi_min, self.xi_max)
        nx = int(round((self.n_x - 1) * 2 * grow)) + 1
        nk = int(round((self.n_xi - 1) * 2 * grow)) + 1
        return GridSpec(xlo, xhi, klo, khi, nx, nk)

    def doubled(self) -> "GridSpec":
        """Same ranges, every step halved."""
        return GridSpec(self.x_min, self.x_max, self.xi_min, self.xi_max, 2 * self.n_x - 1, 2 * self.n_xi - 1)

    def enlarged(self, factor: float = 2.0) -> "GridSpec":
        """Ranges stretched by ``factor`` about their centres at the same steps."""
        g = self.refined(factor)
        return GridSpec(g.x_min, g.x_max, g.xi_min, g.xi_max, int(round((self.n_x - 1) * factor)) + 1, int(round((self.n_xi - 1) * factor)) + 1)

    def to_json(self) -> dict:
        return {
            "x_min": list(self.x_min),
            "x_max": list(self.x_max),
            "xi_min": list(self.xi_min),
            "xi_max": list(self.xi_max),
            "n_x": self.n_x,
            "n_xi": self.n_xi,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GridSpec":
        return cls(obj["x_min"], obj["x_max"], obj["xi_min"], obj["xi_max"], int(obj["n_x"]), int(obj["n_xi"]))


# Defaults for radius-1 windows in one dimension. The reconstruction grid
# covers the x-support of every compactly supported test pairing, and
# |xi| <= 48 keeps the sampled tail of F * V phi below 1e-6 of its peak even
# for first-order delta derivatives. The isometry grid is wider in x to hold
# the Gaussian tails.
DEFAULT_GRID = GridSpec.symmetric(2.5, 48.0, 41, 385)
ISOMETRY_GRID = GridSpec.symmetric(4.0, 16.0, 33, 129)


@dataclass
class TimeFrequencyField:
    grid: GridSpec
    values: np.ndarray  # shape (#x nodes, #xi nodes)
    meta: dict | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        nx = self.grid.n_x**self.grid.dim
        nk = self.grid.n_xi**self.grid.dim
        if self.values.shape != (nx, nk):
            raise ValueError(f"field shape {self.values.shape} does not match grid ({nx}, {nk})")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    def __add__(self, other: "TimeFrequencyField") -> "TimeFrequencyField":
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")
        return TimeFrequencyField(self.grid, self.values + other.values)

    def __mul__(self, c) -> "TimeFrequencyField":
        return TimeFrequencyField(self.grid, self.values * c)

    __rmul__ = __mul__

    def l2_norm_sq(self) -> float:
        wx, wk = self.grid.weights()
        return float(wx @ np.abs(self.values) ** 2 @ wk)

    def to_csv(self, fh) -> int:
        """Write one row per grid node; returns the row count."""
        d = self.grid.dim
        X, K = self.grid.x_nodes(), self.grid.xi_nodes()
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{i + 1}" for i in range(d)] + [f"xi{i + 1}" for i in range(d)] + ["re", "im", "abs"])
        for i in range(X.shape[0]):
            for j in range(K.shape[0]):
                v = self.values[i, j]
                w.writerow([repr(float(c)) for c in X[i]] + [repr(float(c)) for c in K[j]] + [repr(v.real), repr(v.imag), repr(abs(v))])
        return X.shape[0] * K.shape[0]

    def csv_text(self) -> str:
        buf = io.StringIO()
        buf.write("# " + json.dumps({"grid": self.grid.to_json(), **(self.meta or {})}, sort_keys=True) + "\n")
        self.to_csv(buf)
        return buf.getvalue()


# --------------------------------------------------------------------------
# pairing


def pairing(f: TestDistribution, g, quad: QuadSpec = QuadSpec()) -> complex:
    """<f, g> for a smooth g exposing ``g(T)``, ``g.derivative`` and ``g.box``."""
    total = 0j
    for t in f.terms:
        if t.kind == "delta":
            total += t.pair(g)
            continue
        glo, ghi = (np.asarray(v, dtype=float) for v in g.box)
        clipped = t.clip_box(glo, ghi)
        if clipped is None:
            continue
        total += complex(integrate_box(lambda T, t=t: t.density(T) * g(T), clipped[0], clipped[1], quad))
    return total


def _axis_phase(t: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """exp(-2 pi i t xi) for node vector t and frequency vector xi, shape (n, m).

    Equally spaced frequencies are split into coarse and fine offsets so the
    matrix costs two small exponential tables and one product.
    """
    m = xi.size
    step = xi[1] - xi[0] if m > 1 else 0.0
    if m < 64 or not np.allclose(np.diff(xi), step, rtol=1e-12, atol=0):
        return np.exp(-2j * np.pi * np.outer(t, xi))
    block = int(np.ceil(np.sqrt(m)))
    coarse = np.exp(-2j * np.pi * np.outer(t, xi[0] + step * np.arange(0, m, block)))
    fine = np.exp(-2j * np.pi * np.outer(t, step * np.arange(block)))
    return (coarse[:, :, None] * fine[:, None, :]).reshape(t.size, -1)[:, :m]


def _tensor_columns(mats: list[np.ndarray]) -> np.ndarray:
    """Row-wise outer product of per-axis (n, m_k) matrices, in 'ij' column order."""
    out = mats[0]
    for M in mats[1:]:
        out = (out[:, :, None] * M[:, None, :]).reshape(out.shape[0], -1)
    return out


class _Modulated:
    """t -> conj(w(t - x)) exp(-2 pi i xi . t) for one x and a tensor grid of xi."""

    def __init__(self, window, x, xi_axes):
        self.window, self.x = window, np.asarray(x, dtype=float)
        self.xi_axes = [np.asarray(a, dtype=float) for a in xi_axes]
        self.dim = self.x.size

    @property
    def box(self):
        lo, hi = self.window.box
        return np.asarray(lo) + self.x, np.asarray(hi) + self.x

    def __call__(self, T):
        return self.derivative((0,) * self.dim, T)

    def derivative(self, alpha, T):
        """Leibniz expansion; returns shape (n, #xi nodes)."""
        T = np.atleast_2d(T)
        phase = _tensor_columns([_axis_phase(T[:, k], a) for k, a in enumerate(self.xi_axes)])
        out = np.zeros(phase.shape, dtype=complex)
        for beta in sub_indices(alpha):
            rest = tuple(a - b for a, b in zip(alpha, beta))
            wb = np.conj(self.window.derivative(beta, T - self.x))
            poly = _tensor_columns([(-2j * np.pi * a[None, :]) ** r for a, r in zip(self.xi_axes, rest)])
            out += binom_multi(alpha, beta) * wb[:, None] * poly
        return out * phase


def stft_row(f: TestDistribution, window, x, xi_axes, quad: QuadSpec = QuadSpec()) -> np.ndarray:
    """V_window f(x, xi) for one x and every node of the tensor grid ``xi_axes``."""
    g = _Modulated(window, x, xi_axes)
    row = 0
    for t in f.terms:
        if t.kind == "delta":
            row = row + (-1) ** t.order * t.coeff * g.derivative(t.alpha, t.a[None, :])[0]
            continue
        lo, hi = g.box
        clipped = t.clip_box(lo, hi)
        if clipped is None:
            continue
        # start with about 2.5 oscillations per panel at the highest frequency
        width = float(np.max(clipped[1] - clipped[0]))
        top = max(float(np.max(np.abs(a))) for a in g.xi_axes)
        panels = quad.panels
        while panels < width * top / 2.5 and 2 * panels <= quad.max_panels:
            panels *= 2
        spec = replace(quad, panels=panels)
        row = row + integrate_box(lambda T, t=t: t.density(T)[:, None] * g(T), clipped[0], clipped[1], spec)
    if np.isscalar(row):
        row = np.zeros(int(np.prod([a.size for a in g.xi_axes])), dtype=complex)
    return row


def stft(f: TestDistribution, window, grid: GridSpec, quad: QuadSpec = QuadSpec(), xi_sign: float = 1.0) -> TimeFrequencyField:
    """Sample V_window f on ``grid`` (``xi_sign=-1`` evaluates at (x, -xi))."""
    if window.dim != f.dim or grid.dim != f.dim:
        raise ValueError("dimension mismatch between distribution, window and grid")
    X = grid.x_nodes()
    axes = [xi_sign * a for a in grid.xi_axes()]
    vals = np.zeros((X.shape[0], grid.n_xi**grid.dim), dtype=complex)
    if not f.is_zero:
        for i, x in enumerate(X):
            vals[i] = stft_row(f, window, x, axes, quad)
    meta = {"distribution": f.to_json(), "window": window.to_json()}
    return TimeFrequencyField(grid, vals, meta)


# --------------------------------------------------------------------------
# adjoint, reconstruction, isometry


def _tail_fraction(M: np.ndarray, grid: GridSpec) -> float:
    """Largest |M| on the boundary of the (x, xi) grid relative to its peak."""
    peak = np.max(np.abs(M))
    if peak == 0:
        return 0.0
    d = grid.dim
    A = np.abs(M).reshape((grid.n_x,) * d + (grid.n_xi,) * d)
    edge = 0.0
    for ax in range(2 * d):
        edge = max(edge, np.max(np.take(A, 0, axis=ax)), np.max(np.take(A, -1, axis=ax)))
    return float(edge / peak)


def adjoint_apply(F: TimeFrequencyField, window, phi, quad: QuadSpec = QuadSpec(), tail_tol: float = 1e-6) -> complex:
    """<V*_window F, phi> by trapezoid quadrature over the grid of F."""
    if not np.any(F.values):
        return 0j
    G = stft(TestDistribution((FunctionTerm(phi),), phi.dim), window.conj(), F.grid, quad, xi_sign=-1.0).values
    integrand = F.values * G
    tail = _tail_fraction(integrand, F.grid)
    if tail > tail_tol:
        raise GridTooSmall(tail)
    wx, wk = F.grid.weights()
    return complex(wx @ integrand @ wk)


def window_inner(gamma, psi, quad: QuadSpec = QuadSpec()) -> complex:
    """(gamma, psi)_{L2} = int gamma conj(psi)."""
    lo = np.maximum(gamma.box[0], psi.box[0])
    hi = np.minimum(gamma.box[1], psi.box[1])
    return complex(integrate_box(lambda T: gamma(T) * np.conj(psi(T)), lo, hi, quad))


def reconstruct_error(f: TestDistribution, psi, gamma, phi, grid: GridSpec = DEFAULT_GRID, quad: QuadSpec = QuadSpec()) -> float:
    """Relative error of the reconstruction identity (1/(gamma, psi)) V*_gamma V_psi f = f, tested on phi."""
    if f.is_zero:
        return 0.0
    gp = window_inner(gamma, psi, quad)
    if abs(gp) <= 1e-12:
        raise SynthesisWindowError(f"(gamma, psi) = {gp:.3e} is too small for reconstruction")
    F = stft(f, psi, grid, quad)
    lhs = adjoint_apply(F, gamma, phi, quad) / gp
    rhs = pairing(f, phi, quad)
    return float(abs(lhs - rhs) / max(1e-30, abs(rhs)))


def isometry_gap(f: TestDistribution, psi, grid: GridSpec, quad: QuadSpec = QuadSpec()) -> float:
    """| ||V_psi f||^2 - ||psi||^2 ||f||^2 | / (||psi||^2 ||f||^2) on the grid."""
    if not f.is_l2():
        raise ValueError("isometry check needs an L2 distribution (Gaussian-polynomial terms only)")
    if f.is_zero:
        return 0.0
    target = window_inner(psi, psi, quad).real * f.l2_norm_sq(quad)
    got = stft(f, psi, grid, quad).l2_norm_sq()
    return abs(got - target) / target


class _Reflected:
    """t -> phi(x - t)."""

    def __init__(self, phi, x):
        self.phi, self.x, self.dim = phi, np.asarray(x, dtype=float), phi.dim

    @property
    def box(self):
        lo, hi = self.phi.box
        return self.x - np.asarray(hi), self.x - np.asarray(lo)

    def __call__(self, T):
        return self.phi(self.x - np.atleast_2d(T))

    def derivative(self, alpha, T):
        return (-1) ** sum(alpha) * self.phi.derivative(alpha, self.x - np.atleast_2d(T))


def convolve(f: TestDistribution, phi, x_nodes, quad: QuadSpec = QuadSpec()) -> np.ndarray:
    """(f * phi)(x) = <f, phi(x - .)> at each row of ``x_nodes``."""
    X = np.atleast_2d(np.asarray(x_nodes, dtype=float))
    if X.shape[1] != f.dim:
        X = X.reshape(-1, f.dim)
    return np.array([pairing(f, _Reflected(phi, x), quad) for x in X])


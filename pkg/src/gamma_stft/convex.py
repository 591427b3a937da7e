"""Compact convex bodies, open convex regions and their supporting functions.

Bodies are immutable trees: balls, V- and H-polytopes, and the combinators
scaled / reflected / Minkowski sum. ``support_function`` evaluates
h_K(x) = max_{eta in K} x . eta for every variant (vectorised over x), and
``contains`` decides K1 <= K2 with a three-valued verdict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .simplex import InfeasibleLP, LPError, UnboundedLP, lp_maximize

__all__ = [
    "ConvexBody",
    "Ball",
    "VPolytope",
    "HPolytope",
    "Scaled",
    "Reflected",
    "MinkowskiSum",
    "OpenConvexRegion",
    "HRegion",
    "OpenBall",
    "FullSpace",
    "InclusionReport",
    "support_function",
    "argmax_point",
    "minkowski_sum",
    "fatten",
    "reflect",
    "scale",
    "contains",
    "exhaust",
    "min_exhaustion_index",
    "region_contains_body",
    "fatten_margin",
    "open_interval",
    "open_box",
    "intersect_regions",
    "polytope_vertices",
    "hpolytope_vertices",
    "max_norm",
    "eta_lattice",
    "probe_directions",
    "body_from_json",
    "region_from_json",
    "interval",
    "box",
    "point",
]

INCLUSION_TOL = 1e-10
_DIMS = (1, 2, 3)
_BATCH_LP_LIMIT = 32


def _check_dim(d: int) -> int:
    if d not in _DIMS:
        raise ValueError(f"dimension must be one of {_DIMS}, got {d}")
    return d


def _as_points(x, d: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x.reshape(1, -1) if single else x
    if X.shape[-1] != d:
        raise ValueError(f"expected points of dimension {d}, got shape {x.shape}")
    return X, single


def probe_directions(d: int, n_random: int = 64, seed: int = 0) -> np.ndarray:
    """The 2d signed axis directions followed by ``n_random`` seeded unit vectors."""
    axes = np.vstack([np.eye(d), -np.eye(d)])
    if n_random <= 0 or d == 1:
        return axes
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((n_random, d))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    return np.vstack([axes, U])


# --------------------------------------------------------------------------
# bodies


class ConvexBody:
    """Base class for non-empty compact convex subsets of R^d (d <= 3)."""

    dim: int

    def h(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def argmax(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def __add__(self, other: "ConvexBody") -> "MinkowskiSum":
        return minkowski_sum(self, other)

    def __neg__(self) -> "Reflected":
        return Reflected(self)


@dataclass(frozen=True, eq=False)
class Ball(ConvexBody):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float)).copy()
        _check_dim(c.size)
        r = float(self.radius)
        if not np.all(np.isfinite(c)) or not np.isfinite(r):
            raise ValueError("ball data must be finite")
        if r < 0:
            raise ValueError(f"radius must be >= 0, got {r}")
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.size

    def h(self, X):
        return X @ self.center + self.radius * np.linalg.norm(X, axis=1)

    def argmax(self, u):
        n = np.linalg.norm(u)
        if n == 0:
            return self.center.copy()
        return self.center + self.radius * u / n

    def to_json(self):
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class VPolytope(ConvexBody):
    vertices: np.ndarray

    def __post_init__(self):
        V = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if V.size == 0:
            raise ValueError("a V-polytope needs at least one vertex")
        _check_dim(V.shape[1])
        if not np.all(np.isfinite(V)):
            raise ValueError("vertices must be finite")
        _, idx = np.unique(V, axis=0, return_index=True)
        V = V[np.sort(idx)].copy()
        V.setflags(write=False)
        object.__setattr__(self, "vertices", V)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def h(self, X):
        return (X @ self.vertices.T).max(axis=1)

    def argmax(self, u):
        return self.vertices[int(np.argmax(self.vertices @ u))].copy()

    def to_json(self):
        return {"type": "vpolytope", "vertices": self.vertices.tolist()}


@dataclass(frozen=True, eq=False)
class HPolytope(ConvexBody):
    """{eta : A eta <= b}; validated non-empty and bounded at construction."""

    A: np.ndarray
    b: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float)).copy()
        b = np.asarray(self.b, dtype=float).ravel().copy()
        _check_dim(A.shape[1])
        if A.shape[0] != b.size:
            raise ValueError(f"A has {A.shape[0]} rows but b has {b.size} entries")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("H-polytope data must be finite")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        d = A.shape[1]
        lo, hi = np.empty(d), np.empty(d)
        try:
            for j in range(d):
                e = np.zeros(d)
                e[j] = 1.0
                hi[j] = lp_maximize(A, b, e)[0]
                lo[j] = -lp_maximize(A, b, -e)[0]
        except InfeasibleLP as exc:
            raise ValueError("H-polytope is empty") from exc
        except UnboundedLP as exc:
            raise ValueError("H-polytope is unbounded") from exc
        self._cache["bbox"] = (lo, hi)

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    @property
    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return self._cache["bbox"]

    def _solve(self, u: np.ndarray) -> tuple[float, np.ndarray]:
        key = tuple(np.round(u, 15))
        hit = self._cache.get(key)
        if hit is None:
            hit = lp_maximize(self.A, self.b, u)
            self._cache[key] = hit
        return hit

    def h(self, X):
        if X.shape[0] > _BATCH_LP_LIMIT:
            # every LP optimum is attained at a vertex; enumerate them once
            return (X @ polytope_vertices(self).T).max(axis=1)
        norms = np.linalg.norm(X, axis=1)
        out = np.zeros(X.shape[0])
        for i in np.flatnonzero(norms > 0):
            out[i] = norms[i] * self._solve(X[i] / norms[i])[0]
        return out

    def argmax(self, u):
        n = np.linalg.norm(u)
        if n == 0:
            return self._solve(np.zeros_like(u))[1].copy()
        return self._solve(u / n)[1].copy()

    def to_json(self):
        return {"type": "hpolytope", "A": self.A.tolist(), "b": self.b.tolist()}


@dataclass(frozen=True, eq=False)
class Scaled(ConvexBody):
    factor: float
    body: ConvexBody

    def __post_init__(self):
        lam = float(self.factor)
        if not np.isfinite(lam) or lam < 0:
            raise ValueError("scale factor must be finite and >= 0 (use Reflected for -K)")
        object.__setattr__(self, "factor", lam)

    @property
    def dim(self) -> int:
        return self.body.dim

    def h(self, X):
        return self.factor * self.body.h(X)

    def argmax(self, u):
        return self.factor * self.body.argmax(u)

    def to_json(self):
        return {"type": "scaled", "factor": self.factor, "body": self.body.to_json()}


@dataclass(frozen=True, eq=False)
class Reflected(ConvexBody):
    body: ConvexBody

    @property
    def dim(self) -> int:
        return self.body.dim

    def h(self, X):
        return self.body.h(-X)

    def argmax(self, u):
        return -self.body.argmax(-np.asarray(u, dtype=float))

    def to_json(self):
        return {"type": "reflected", "body": self.body.to_json()}


@dataclass(frozen=True, eq=False)
class MinkowskiSum(ConvexBody):
    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("Minkowski sum of no bodies")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise ValueError(f"dimension mismatch in Minkowski sum: {sorted(dims)}")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def h(self, X):
        return sum(p.h(X) for p in self.parts)

    def argmax(self, u):
        return sum(p.argmax(u) for p in self.parts)

    def to_json(self):
        return {"type": "sum", "parts": [p.to_json() for p in self.parts]}


def point(a) -> VPolytope:
    return VPolytope(np.atleast_2d(np.asarray(a, dtype=float)))


def interval(lo: float, hi: float) -> HPolytope:
    return HPolytope([[1.0], [-1.0]], [hi, -lo])


def box(lo: Sequence[float], hi: Sequence[float]) -> HPolytope:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    d = lo.size
    return HPolytope(np.vstack([np.eye(d), -np.eye(d)]), np.concatenate([hi, -lo]))


def support_function(K: ConvexBody, x) -> np.ndarray | float:
    """h_K(x) = max over eta in K of x . eta; ``x`` of shape (d,) or (n, d)."""
    X, single = _as_points(x, K.dim)
    if not np.all(np.isfinite(X)):
        raise ValueError("support function argument must be finite")
    out = K.h(X)
    return float(out[0]) if single else out


def argmax_point(K: ConvexBody, u) -> np.ndarray:
    """A point of K attaining h_K(u)."""
    return K.argmax(np.asarray(u, dtype=float))


def minkowski_sum(K1: ConvexBody, K2: ConvexBody) -> MinkowskiSum:
    if K1.dim != K2.dim:
        raise ValueError(f"dimension mismatch: {K1.dim} vs {K2.dim}")
    return MinkowskiSum((K1, K2))


def fatten(K: ConvexBody, eps: float) -> MinkowskiSum:
    """K_eps = K + closed ball of radius eps."""
    if not eps > 0:
        raise ValueError(f"fattening radius must be > 0, got {eps}")
    return MinkowskiSum((K, Ball(np.zeros(K.dim), eps)))


def reflect(K: ConvexBody) -> Reflected:
    return Reflected(K)


def scale(lam: float, K: ConvexBody) -> Scaled:
    return Scaled(lam, K)


# --------------------------------------------------------------------------
# exact representations used by certificates


def hpolytope_vertices(A, b, tol: float = 1e-9) -> np.ndarray:
    """Vertices of {x : A x <= b} by enumerating d-subsets of constraints."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    m, d = A.shape
    found = []
    for rows in itertools.combinations(range(m), d):
        M = A[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        v = np.linalg.solve(M, b[list(rows)])
        if np.all(A @ v <= b + tol * (1 + np.abs(b))):
            found.append(v)
    if not found:
        return np.empty((0, d))
    V = np.array(found)
    keep = []
    for v in V:
        if not any(np.linalg.norm(v - w) <= 1e-9 for w in keep):
            keep.append(v)
    return np.array(keep)


def _reduce_hull(V: np.ndarray) -> np.ndarray:
    if V.shape[1] == 1:
        return np.array([[V.min()], [V.max()]]) if V.min() < V.max() else V[:1]
    try:
        from scipy.spatial import ConvexHull

        return V[ConvexHull(V).vertices]
    except Exception:  # degenerate (lower-dimensional) point sets
        return np.unique(np.round(V, 12), axis=0)


def polytope_vertices(K: ConvexBody) -> np.ndarray | None:
    """A finite point set whose convex hull is K, or None if K is not a polytope."""
    if isinstance(K, VPolytope):
        return K.vertices.copy()
    if isinstance(K, HPolytope):
        key = "vertices"
        if key not in K._cache:
            K._cache[key] = hpolytope_vertices(K.A, K.b)
        return K._cache[key].copy()
    if isinstance(K, Scaled):
        V = polytope_vertices(K.body)
        return None if V is None else K.factor * V
    if isinstance(K, Reflected):
        V = polytope_vertices(K.body)
        return None if V is None else -V
    if isinstance(K, MinkowskiSum):
        sets = [polytope_vertices(p) for p in K.parts]
        if any(s is None for s in sets):
            return None
        V = sets[0]
        for S in sets[1:]:
            V = _reduce_hull((V[:, None, :] + S[None, :, :]).reshape(-1, V.shape[1]))
        return V
    return None


def _as_ball(K: ConvexBody) -> tuple[np.ndarray, float] | None:
    """(center, radius) when K is exactly a ball (points count as radius 0)."""
    if isinstance(K, Ball):
        return K.center.copy(), K.radius
    if isinstance(K, VPolytope) and K.vertices.shape[0] == 1:
        return K.vertices[0].copy(), 0.0
    if isinstance(K, Scaled):
        cr = _as_ball(K.body)
        return None if cr is None else (K.factor * cr[0], K.factor * cr[1])
    if isinstance(K, Reflected):
        cr = _as_ball(K.body)
        return None if cr is None else (-cr[0], cr[1])
    if isinstance(K, MinkowskiSum):
        parts = [_as_ball(p) for p in K.parts]
        if any(p is None for p in parts):
            return None
        return sum(p[0] for p in parts), sum(p[1] for p in parts)
    return None


def _as_hform(K: ConvexBody) -> tuple[np.ndarray, np.ndarray] | None:
    if isinstance(K, HPolytope):
        return K.A, K.b
    if isinstance(K, Scaled) and K.factor > 0:
        ab = _as_hform(K.body)
        return None if ab is None else (ab[0], K.factor * ab[1])
    if isinstance(K, Reflected):
        ab = _as_hform(K.body)
        return None if ab is None else (-ab[0], ab[1])
    return None


def _contains_origin(K: ConvexBody) -> bool:
    if isinstance(K, Ball):
        return bool(np.linalg.norm(K.center) <= K.radius + INCLUSION_TOL)
    if isinstance(K, HPolytope):
        return bool(np.all(K.b >= -INCLUSION_TOL))
    if isinstance(K, (Scaled, Reflected)):
        return _contains_origin(K.body)
    if isinstance(K, MinkowskiSum):
        return all(_contains_origin(p) for p in K.parts)
    V = polytope_vertices(K)
    return V is not None and _in_hull(np.zeros(K.dim), V)


def _in_hull(p: np.ndarray, V: np.ndarray) -> bool:
    """Exact-ish LP test p in conv(V)."""
    n, d = V.shape
    # variables lambda (n); constraints lambda >= 0, sum = 1, V^T lambda = p
    A = np.vstack([-np.eye(n), np.ones((1, n)), -np.ones((1, n)), V.T, -V.T])
    b = np.concatenate([np.zeros(n), [1.0], [-1.0], p + INCLUSION_TOL, -p + INCLUSION_TOL])
    try:
        lp_maximize(A, b, np.zeros(n))
        return True
    except InfeasibleLP:
        return False


def _separating_direction(p: np.ndarray, V: np.ndarray) -> np.ndarray | None:
    """u with p.u > max_j V_j.u, if one exists."""
    d = V.shape[1]
    # variables (u, t): maximize p.u - t with V u - t <= 0 and |u_i| <= 1
    A = np.vstack(
        [
            np.hstack([V, -np.ones((V.shape[0], 1))]),
            np.hstack([np.eye(d), np.zeros((d, 1))]),
            np.hstack([-np.eye(d), np.zeros((d, 1))]),
        ]
    )
    b = np.concatenate([np.zeros(V.shape[0]), np.ones(2 * d)])
    c = np.concatenate([p, [-1.0]])
    val, z = lp_maximize(A, b, c)
    if val <= INCLUSION_TOL:
        return None
    u = z[:d]
    return u / np.linalg.norm(u)


# --------------------------------------------------------------------------
# inclusion


@dataclass
class InclusionReport:
    verdict: str  # "certified" | "falsified" | "undetermined"
    witness: list | None = None
    certificate: str | None = None
    directions_tested: int = 0
    violation: float | None = None

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": self.witness,
            "certificate": self.certificate,
            "directions_tested": self.directions_tested,
            "violation": self.violation,
        }


def _falsified(inner, outer, u, tested, tag=None) -> InclusionReport:
    u = np.asarray(u, dtype=float)
    gap = float(inner.h(u[None])[0] - outer.h(u[None])[0])
    return InclusionReport("falsified", u.tolist(), tag, tested, gap)


def contains(inner: ConvexBody, outer: ConvexBody, n_dirs: int = 64, seed: int = 0) -> InclusionReport:
    """Decide ``inner <= outer`` through supporting functions.

    Exact certificates are issued when ``outer`` has an H-form (compare
    h_inner on each facet normal), when both are balls, when ``outer`` is a
    ball and ``inner`` a polytope, when both are polytopes (hull membership of
    each vertex), or when ``outer`` is ``inner`` plus summands containing 0.
    Anything else is probed on sampled directions and can only be falsified.
    """
    if inner.dim != outer.dim:
        raise ValueError(f"dimension mismatch: {inner.dim} vs {outer.dim}")
    d = inner.dim
    if n_dirs < 2 * d:
        raise ValueError(f"n_dirs must be >= 2d = {2 * d}")

    if inner is outer or inner.to_json() == outer.to_json():
        return InclusionReport("certified", certificate="identical")

    hform = _as_hform(outer)
    if hform is not None:
        A, b = hform
        norms = np.linalg.norm(A, axis=1)
        ok = norms > 0
        U = A[ok] / norms[ok, None]
        gaps = inner.h(U) - b[ok] / norms[ok]
        worst = int(np.argmax(gaps))
        if gaps[worst] <= INCLUSION_TOL:
            return InclusionReport("certified", certificate="h-form facets", directions_tested=len(U))
        return _falsified(inner, outer, U[worst], len(U), "h-form facets")

    out_ball = _as_ball(outer)
    if out_ball is not None:
        c, R = out_ball
        in_ball = _as_ball(inner)
        if in_ball is not None:
            c2, r2 = in_ball
            dist = np.linalg.norm(c2 - c)
            if dist + r2 <= R + INCLUSION_TOL:
                return InclusionReport("certified", certificate="ball in ball")
            u = (c2 - c) / dist if dist > 0 else np.eye(d)[0]
            return _falsified(inner, outer, u, 1, "ball in ball")
        V = polytope_vertices(inner)
        if V is not None:
            dists = np.linalg.norm(V - c, axis=1)
            k = int(np.argmax(dists))
            if dists[k] <= R + INCLUSION_TOL:
                return InclusionReport("certified", certificate="vertices in ball")
            return _falsified(inner, outer, (V[k] - c) / dists[k], 1, "vertices in ball")

    V_out = polytope_vertices(outer)
    V_in = polytope_vertices(inner)
    if V_out is not None and V_in is not None:
        for v in V_in:
            if not _in_hull(v, V_out):
                u = _separating_direction(v, V_out)
                if u is not None:
                    return _falsified(inner, outer, u, 1, "vertex hull membership")
        else:
            return InclusionReport("certified", certificate="vertex hull membership")

    if isinstance(outer, MinkowskiSum):
        ref = inner.to_json()
        for i, part in enumerate(outer.parts):
            if part.to_json() == ref:
                rest = outer.parts[:i] + outer.parts[i + 1 :]
                if all(_contains_origin(p) for p in rest):
                    return InclusionReport("certified", certificate="summand plus origin-containing parts")

    U = probe_directions(d, n_dirs, seed)
    gaps = inner.h(U) - outer.h(U)
    worst = int(np.argmax(gaps))
    if gaps[worst] > INCLUSION_TOL:
        return _falsified(inner, outer, U[worst], len(U), "sampled")
    return InclusionReport("undetermined", certificate="sampled", directions_tested=len(U))


# --------------------------------------------------------------------------
# open regions and exhaustions


class OpenConvexRegion:
    dim: int

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class HRegion(OpenConvexRegion):
    """{x : A x < b} (strict inequalities)."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float)).copy()
        b = np.asarray(self.b, dtype=float).ravel().copy()
        _check_dim(A.shape[1])
        if A.shape[0] != b.size:
            raise ValueError("A and b disagree in row count")
        if np.any(np.linalg.norm(A, axis=1) == 0):
            raise ValueError("zero rows are not allowed in an H-region")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        # interior point: maximize t subject to A x + |a_i| t <= b, t <= 1
        norms = np.linalg.norm(A, axis=1)
        d = A.shape[1]
        AA = np.vstack([np.hstack([A, norms[:, None]]), np.hstack([np.zeros((1, d)), [[1.0]]])])
        bb = np.concatenate([b, [1.0]])
        c = np.zeros(d + 1)
        c[-1] = 1.0
        try:
            t, _ = lp_maximize(AA, bb, c)
        except LPError as exc:
            raise ValueError("open region is empty") from exc
        if t <= 0:
            raise ValueError("open region is empty")

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    def contains_point(self, x) -> bool:
        return bool(np.all(self.A @ np.asarray(x, dtype=float) < self.b))

    def to_json(self):
        return {"type": "hregion", "A": self.A.tolist(), "b": self.b.tolist()}


@dataclass(frozen=True, eq=False)
class OpenBall(OpenConvexRegion):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float)).copy()
        _check_dim(c.size)
        if not self.radius > 0:
            raise ValueError("open ball needs a positive radius")
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.size

    def contains_point(self, x) -> bool:
        return bool(np.linalg.norm(np.asarray(x, dtype=float) - self.center) < self.radius)

    def to_json(self):
        return {"type": "open_ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True)
class FullSpace(OpenConvexRegion):
    dim: int

    def __post_init__(self):
        _check_dim(self.dim)

    def contains_point(self, x) -> bool:
        return True

    def to_json(self):
        return {"type": "full_space", "dim": self.dim}


def open_interval(lo: float = -np.inf, hi: float = np.inf) -> OpenConvexRegion:
    rows, rhs = [], []
    if np.isfinite(hi):
        rows.append([1.0])
        rhs.append(hi)
    if np.isfinite(lo):
        rows.append([-1.0])
        rhs.append(-lo)
    return HRegion(rows, rhs) if rows else FullSpace(1)


def open_box(lo, hi) -> HRegion:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    d = lo.size
    return HRegion(np.vstack([np.eye(d), -np.eye(d)]), np.concatenate([hi, -lo]))


def intersect_regions(regions: Iterable[OpenConvexRegion], dim: int) -> OpenConvexRegion:
    """Intersection of H-regions and full spaces (balls are not supported)."""
    rows, rhs = [], []
    for R in regions:
        if R.dim != dim:
            raise ValueError("dimension mismatch in region intersection")
        if isinstance(R, FullSpace):
            continue
        if not isinstance(R, HRegion):
            raise ValueError("only H-regions and full spaces can be intersected")
        rows.append(R.A)
        rhs.append(R.b)
    if not rows:
        return FullSpace(dim)
    return HRegion(np.vstack(rows), np.concatenate(rhs))


def _shrunk_hpolytope(G: HRegion, N: int) -> tuple[np.ndarray, np.ndarray]:
    d = G.dim
    norms = np.linalg.norm(G.A, axis=1)
    A = np.vstack([G.A, np.eye(d), -np.eye(d)])
    b = np.concatenate([G.b - norms / N, np.full(2 * d, float(N))])
    return A, b


def _feasible(A, b) -> bool:
    try:
        lp_maximize(A, b, np.zeros(A.shape[1]))
        return True
    except InfeasibleLP:
        return False


def min_exhaustion_index(G: OpenConvexRegion) -> int:
    """Smallest N for which ``exhaust(G, N)`` is non-empty."""
    if not isinstance(G, HRegion):
        return 1
    if _feasible(*_shrunk_hpolytope(G, 1)):
        return 1
    hi = 2
    while not _feasible(*_shrunk_hpolytope(G, hi)):
        hi *= 2
        if hi > 2**40:
            raise ValueError("could not find a non-empty exhaustion body")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _feasible(*_shrunk_hpolytope(G, mid)):
            hi = mid
        else:
            lo = mid
    return hi


def exhaust(G: OpenConvexRegion, N: int) -> ConvexBody:
    """The N-th body K_N of a fixed nested exhaustion of G by compact convex sets.

    H-regions: facets pulled in by |a_i|/N, intersected with [-N, N]^d.
    Open balls: concentric closed ball of radius r (1 - 1/(N+1)).
    Full space: closed ball of radius N about the origin.
    """
    N = int(N)
    if N < 1:
        raise ValueError("exhaustion index too small")
    if isinstance(G, FullSpace):
        return Ball(np.zeros(G.dim), float(N))
    if isinstance(G, OpenBall):
        return Ball(G.center, G.radius * (1.0 - 1.0 / (N + 1)))
    if isinstance(G, HRegion):
        A, b = _shrunk_hpolytope(G, N)
        if not _feasible(A, b):
            raise ValueError(f"exhaustion index too small: N={N} < N0={min_exhaustion_index(G)}")
        return HPolytope(A, b)
    raise TypeError(f"unsupported region {type(G).__name__}")


def _max_dist(K: ConvexBody, c: np.ndarray) -> float:
    """Upper bound for max_{eta in K} |eta - c|; exact for balls and polytopes."""
    cr = _as_ball(K)
    if cr is not None:
        return float(np.linalg.norm(cr[0] - c) + cr[1])
    V = polytope_vertices(K)
    if V is not None:
        return float(np.max(np.linalg.norm(V - c, axis=1)))
    if isinstance(K, MinkowskiSum):
        return _max_dist(K.parts[0], c) + sum(max_norm(p) for p in K.parts[1:])
    if isinstance(K, Scaled):
        return K.factor * _max_dist(K.body, c / K.factor) if K.factor > 0 else float(np.linalg.norm(c))
    if isinstance(K, Reflected):
        return _max_dist(K.body, -c)
    raise TypeError(type(K).__name__)


def max_norm(K: ConvexBody) -> float:
    """Upper bound for max_{eta in K} |eta| (exact for balls and polytopes)."""
    return _max_dist(K, np.zeros(K.dim))


def region_contains_body(G: OpenConvexRegion, K: ConvexBody) -> bool:
    """Exact check that the compact body K lies inside the open region G."""
    if G.dim != K.dim:
        raise ValueError("dimension mismatch")
    if isinstance(G, FullSpace):
        return True
    if isinstance(G, OpenBall):
        return _max_dist(K, G.center) < G.radius
    norms = np.linalg.norm(G.A, axis=1)
    return bool(np.all(K.h(G.A / norms[:, None]) < G.b / norms - 1e-12))


def fatten_margin(G: OpenConvexRegion, K: ConvexBody) -> float:
    """Largest eps with K_eps still inside G (inf for the full space)."""
    if isinstance(G, FullSpace):
        return np.inf
    if isinstance(G, OpenBall):
        return G.radius - _max_dist(K, G.center)
    norms = np.linalg.norm(G.A, axis=1)
    return float(np.min(G.b / norms - K.h(G.A / norms[:, None])))


def eta_lattice(K: ConvexBody, n_samples: int = 64, seed: int = 0) -> np.ndarray:
    """Seeded sample of K: extreme points first, then random convex combinations.

    Polytopes contribute their vertices; other bodies contribute the support
    points in the probe directions. At most ``max(n_samples, #extreme)`` rows.
    """
    V = polytope_vertices(K)
    if V is None:
        U = probe_directions(K.dim, 32, seed)
        V = np.array([K.argmax(u) for u in U])
    pts = [V]
    extra = n_samples - V.shape[0]
    if extra > 0 and V.shape[0] > 1:
        rng = np.random.default_rng(seed)
        W = rng.dirichlet(np.ones(V.shape[0]), size=extra)
        pts.append(W @ V)
    return np.vstack(pts)


# --------------------------------------------------------------------------
# JSON


def body_from_json(obj: dict) -> ConvexBody:
    kind = obj["type"]
    if kind == "ball":
        return Ball(obj["center"], obj["radius"])
    if kind == "vpolytope":
        return VPolytope(obj["vertices"])
    if kind == "hpolytope":
        return HPolytope(obj["A"], obj["b"])
    if kind == "interval":
        return interval(obj["lo"], obj["hi"])
    if kind == "box":
        return box(obj["lo"], obj["hi"])
    if kind == "point":
        return point(obj["at"])
    if kind == "scaled":
        return Scaled(obj["factor"], body_from_json(obj["body"]))
    if kind == "reflected":
        return Reflected(body_from_json(obj["body"]))
    if kind == "sum":
        return MinkowskiSum(tuple(body_from_json(p) for p in obj["parts"]))
    raise ValueError(f"unknown body type {kind!r}")


def region_from_json(obj: dict) -> OpenConvexRegion:
    kind = obj["type"]
    if kind == "hregion":
        return HRegion(obj["A"], obj["b"])
    if kind == "open_ball":
        return OpenBall(obj["center"], obj["radius"])
    if kind == "full_space":
        return FullSpace(int(obj["dim"]))
    if kind == "open_interval":
        lo = obj.get("lo")
        hi = obj.get("hi")
        return open_interval(-np.inf if lo is None else lo, np.inf if hi is None else hi)
    if kind == "open_box":
        return open_box(obj["lo"], obj["hi"])
    raise ValueError(f"unknown region type {kind!r}")

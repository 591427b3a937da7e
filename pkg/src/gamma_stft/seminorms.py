"""Seminorms on test functions, distributions and time-frequency fields, and
numerical certification of the explicit estimates that tie them together.

Every "sup < infinity" statement becomes a trend verdict on an expanding
ladder of windows; every displayed inequality becomes a :class:`BoundReport`
holding the largest sampled ratio of left- to right-hand side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import convex as cg
from .distributions import TestDistribution
from .functions import SchwartzTestFunction, TiltedWindow, Window, binom_multi, multi_indices, sub_indices
from .quadrature import QuadSpec, integrate_box
from .stft import GridSpec, TimeFrequencyField, adjoint_apply, convolve, stft, stft_row
from .weights import ConstantWeight, PolyInvWeight, Weight, WeightSystem, nachbin_member, pol_system

__all__ = [
    "BoundReport",
    "MembershipVerdict",
    "GuardError",
    "schwartz_norm",
    "weighted_cn_norm",
    "tf_weighted_norm",
    "p_seminorm",
    "lemma1_constant",
    "lemma1_suite",
    "lemma2_constant",
    "lemma2_sup_constant",
    "lemma2_suite",
    "Ladder",
    "trend_verdict",
    "gamma_membership",
    "membership_ladder",
    "adjoint_bound_suite",
    "adjoint_constant",
    "tensor_membership_scan",
    "convolutor_suite",
    "default_family",
]

BOUND_TOL = 1e-8
GUARD = 1e-9
_MAX_STORED = 50


class GuardError(RuntimeError):
    """A numerical guard failed (sampling box or grid too small)."""


@dataclass
class BoundReport:
    name: str
    n_points: int
    max_ratio: float
    violations: list
    constant_used: float
    tol: float = BOUND_TOL
    n_violations: int = 0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.n_violations == 0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "n_points": self.n_points,
            "max_ratio": self.max_ratio,
            "violations": self.violations,
            "n_violations": self.n_violations,
            "constant_used": self.constant_used,
            "tol": self.tol,
            "details": self.details,
        }


def _bound_report(name, ratios: np.ndarray, coords, constant, tol=BOUND_TOL, **details) -> BoundReport:
    ratios = np.asarray(ratios, dtype=float).ravel()
    bad = np.flatnonzero(ratios > 1 + tol)
    viol = [{"coords": coords(i), "ratio": float(ratios[i])} for i in bad[:_MAX_STORED]]
    mr = float(np.max(ratios)) if ratios.size else 0.0
    return BoundReport(name, int(ratios.size), mr, viol, float(constant), tol, int(bad.size), details)


@dataclass
class MembershipVerdict:
    trend: str  # bounded | diverging | inconclusive
    sups: list
    windows: list
    table: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"trend": self.trend, "sups": self.sups, "windows": self.windows, "table": self.table, "details": self.details}


def trend_verdict(sups) -> str:
    """bounded: last increment below 5%; diverging: last three grow by more than 1.5x each."""
    s = [float(v) for v in sups]
    if len(s) < 3:
        raise ValueError("a trend needs at least three windows")
    if s[-1] <= 1.05 * s[-2] or s[-1] == 0.0:
        return "bounded"
    a, b, c = s[-3:]
    if a > 0 and b > 1.5 * a and c > 1.5 * b:
        return "diverging"
    return "inconclusive"


# --------------------------------------------------------------------------
# test-function norms


def _dense_grid(lo, hi, d: int) -> np.ndarray:
    n = {1: 4001, 2: 201, 3: 41}[d]
    axes = [np.linspace(a, b, n) for a, b in zip(lo, hi)]
    G = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in G], axis=1)


def _boundary_mask(T, lo, hi) -> np.ndarray:
    return np.any(np.isclose(T, lo) | np.isclose(T, hi), axis=1)


def _sup_with_weight(phi, log_weight, n: int, start_box) -> float:
    """max_{|alpha|<=n} sup |d^alpha phi| * weight, on a guarded dense grid with local polishing."""
    lo, hi = (np.asarray(v, dtype=float) for v in start_box)
    compact = isinstance(phi, Window) or getattr(phi, "bump", None) is not None
    alphas = multi_indices(phi.dim, n)
    # at most three enlargements: larger boxes would underflow and hide growth
    for _ in range(4):
        T = _dense_grid(lo, hi, phi.dim)
        lw = log_weight(T)
        with np.errstate(divide="ignore", over="ignore"):
            vals = np.exp(np.max([np.log(np.abs(phi.derivative(a, T))) + lw for a in alphas], axis=0))
        if not np.all(np.isfinite(vals)):
            raise GuardError("enlarge box: the weighted derivatives overflow")
        peak = float(np.max(vals))
        edge = float(np.max(vals[_boundary_mask(T, lo, hi)]))
        if compact or peak == 0 or edge <= GUARD * peak:
            break
        c, h = (lo + hi) / 2, (hi - lo) / 2
        lo, hi = c - 1.5 * h, c + 1.5 * h
    else:
        raise GuardError("enlarge box: boundary contribution of the norm did not fall below 1e-9 of its maximum")
    i = int(np.argmax(vals))
    best = peak
    for a in alphas:
        f = lambda s, a=a: -float(np.abs(phi.derivative(a, s[None, :]))[0] * np.exp(log_weight(s[None, :]))[0])
        res = minimize(f, T[i], method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 400})
        if np.all(res.x >= lo) and np.all(res.x <= hi):
            best = max(best, -float(res.fun))
    return best


def schwartz_norm(phi, k: int, n: int) -> float:
    """||phi||_{S^n_k} = max_{|alpha|<=n} sup |d^alpha phi(t)| (1 + |t|)^k."""
    box = phi.box_for(degree=k) if hasattr(phi, "box_for") else phi.box
    return _sup_with_weight(phi, lambda T: k * np.log1p(np.linalg.norm(T, axis=1)), n, box)


def weighted_cn_norm(phi, v: Weight, n: int) -> float:
    """||phi||_{v,n} = max_{|alpha|<=n} sup |d^alpha phi| v."""
    return _sup_with_weight(phi, v.log, n, phi.box)


def tf_weighted_norm(F: TimeFrequencyField, K: cg.ConvexBody, v: Weight) -> float:
    """max over grid nodes of |F(x, xi)| exp(h_{-K}(x)) v(xi)."""
    A = np.abs(F.values)
    if not np.any(A):
        return 0.0
    with np.errstate(divide="ignore"):
        L = np.log(A) + np.asarray(cg.Reflected(K).h(F.grid.x_nodes()))[:, None] + v.log(F.grid.xi_nodes())[None, :]
    return float(np.exp(np.max(L)))


def p_seminorm(f: TestDistribution, K: cg.ConvexBody, B, eta_samples: int = 64, seed: int = 0, quad: QuadSpec = QuadSpec()) -> float:
    """sup_{eta in K} sup_{phi in B} |<exp(-eta . t) f, phi>| over a seeded eta lattice."""
    if not cg.region_contains_body(f.region(), K):
        raise ValueError("seminorm undefined outside Gamma: K is not inside the region of f")
    B = list(B)
    if not B or f.is_zero:
        return 0.0
    from .stft import pairing

    best = 0.0
    for eta in cg.eta_lattice(K, eta_samples, seed):
        f_eta = f.reweighted(eta)
        for phi in B:
            best = max(best, abs(pairing(f_eta, phi, quad)))
    return best


# --------------------------------------------------------------------------
# bounded-family estimate


def _sup_decay_poly(eps: float, k: int) -> float:
    """sup_{s >= 0} exp(-eps s) (1 + s)^k, attained at s = max(0, k/eps - 1)."""
    s = max(0.0, k / eps - 1.0)
    return math.exp(-eps * s) * (1.0 + s) ** k


def lemma1_constant(psi: Window, K: cg.ConvexBody, eps: float, v: Weight, k: int, n: int) -> dict:
    """The product constant bounding the family's S^n_k norms, factor by factor."""
    r = psi.support_radius
    R = max(1.0, cg.max_norm(K))
    nb = nachbin_member(v, pol_system(n, psi.dim), dim=psi.dim)
    if not nb.passed:
        raise ValueError("v fails Nachbin membership against the polynomial system")
    sup_v = nb.witnesses[-1]["sup"]
    head = math.exp(R * r) * (8 * math.pi * R) ** n * psi.max_sup_norm(n) * (1 + r) ** k
    sup_x = _sup_decay_poly(eps, k)
    return {"R": R, "r": r, "head": head, "sup_x": sup_x, "sup_xi": sup_v, "C": head * sup_x * sup_v}


def _family_norms(psi: Window, eta, xs, xis, k: int, n: int, s_grid) -> np.ndarray:
    """||exp(eta.(t-x)) conj(M_xi T_x psi)(t)||_{S^n_k, t} for all (x, xi); shape (#x, #xi)."""
    tw = TiltedWindow(psi, tuple(eta))
    d = psi.dim
    alphas = multi_indices(d, n)
    D = {b: tw.derivative(b, s_grid) for b in alphas}
    # (1 + |s + x|)^k for every x
    wx = (1.0 + np.linalg.norm(s_grid[None, :, :] + xs[:, None, :], axis=2)) ** k
    out = np.zeros((xs.shape[0], xis.shape[0]))
    for j, xi in enumerate(xis):
        c = -2j * np.pi * xi
        best = np.zeros(xs.shape[0])
        for a in alphas:
            G = np.zeros(s_grid.shape[0], dtype=complex)
            for b in sub_indices(a):
                rest = tuple(p - q for p, q in zip(a, b))
                G += binom_multi(a, b) * D[b] * np.prod(c ** np.array(rest))
            best = np.maximum(best, np.max(np.abs(G)[None, :] * wx, axis=1))
        out[:, j] = best
    return out


def _sample_axes(d: int, x_half: float, xi_half: float, nx: int, nxi: int):
    ax = np.linspace(-x_half, x_half, nx)
    axi = np.linspace(-xi_half, xi_half, nxi)
    X = np.stack([g.ravel() for g in np.meshgrid(*[ax] * d, indexing="ij")], axis=1)
    XI = np.stack([g.ravel() for g in np.meshgrid(*[axi] * d, indexing="ij")], axis=1)
    return X, XI


_LEMMA1_SAMPLES = {1: (25, 17, 2001), 2: (5, 5, 61), 3: (3, 3, 21)}


def lemma1_suite(psi: Window, K: cg.ConvexBody, eps: float, v: Weight, k: int, n: int, x_half: float = 6.0, xi_half: float = 8.0, eta_samples: int = 9, seed: int = 0) -> BoundReport:
    """Sampled LHS / RHS of the bounded-family estimate over (x, xi, eta)."""
    if eps <= 0:
        raise ValueError("eps must be > 0")
    const = lemma1_constant(psi, K, eps, v, k, n)
    nx, nxi, ns = _LEMMA1_SAMPLES[psi.dim]
    X, XI = _sample_axes(psi.dim, x_half, xi_half, nx, nxi)
    lo, hi = psi.box
    s_axes = [np.linspace(a, b, ns) for a, b in zip(lo, hi)]
    S = np.stack([g.ravel() for g in np.meshgrid(*s_axes, indexing="ij")], axis=1)
    etas = cg.eta_lattice(K, eta_samples, seed)
    pref = np.exp(-eps * np.linalg.norm(X, axis=1))[:, None] * v(XI)[None, :]
    ratios = np.stack([pref * _family_norms(psi, eta, X, XI, k, n, S) / const["C"] for eta in etas])
    shape = ratios.shape

    def coords(i):
        e, a, b = np.unravel_index(i, shape)
        return {"eta": etas[e].tolist(), "x": X[a].tolist(), "xi": XI[b].tolist()}

    return _bound_report("lemma1", ratios, coords, const["C"], k=k, n=n, eps=eps, factors=const)


# --------------------------------------------------------------------------
# window-transform decay estimate


def lemma2_constant(psi: Window, eta, k: int, n: int, quad: QuadSpec = QuadSpec()) -> float:
    """4^n (1+sqrt d)^n max{1,|eta|^n} max_{|alpha|<=n} ||d^alpha psi||_inf int_supp exp(-eta.t)(1+|t|)^k dt."""
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    d = psi.dim
    lo, hi = psi.box
    integral = float(integrate_box(lambda T: np.exp(-T @ eta) * (1 + np.linalg.norm(T, axis=1)) ** k, lo, hi, quad))
    return 4**n * (1 + math.sqrt(d)) ** n * max(1.0, float(np.linalg.norm(eta)) ** n) * psi.max_sup_norm(n) * integral


def lemma2_sup_constant(psi: Window, K: cg.ConvexBody, k: int, n: int, quad: QuadSpec = QuadSpec()) -> float:
    """An upper bound for sup_{eta in K} of the constant above.

    Uses max |eta| over K and exp(-eta . t) <= exp(h_{-K}(t)) inside the integral.
    """
    d = psi.dim
    lo, hi = psi.box
    RK = cg.Reflected(K)
    integral = float(integrate_box(lambda T: np.exp(RK.h(T)) * (1 + np.linalg.norm(T, axis=1)) ** k, lo, hi, quad))
    return 4**n * (1 + math.sqrt(d)) ** n * max(1.0, cg.max_norm(K) ** n) * psi.max_sup_norm(n) * integral


LEMMA2_GRID = GridSpec.symmetric(6.0, 200.0, 100, 100)
LEMMA2_TAIL = 1e-8


def _lhs_field(psi: Window, eta, phi, grid: GridSpec, quad: QuadSpec) -> np.ndarray:
    """|V_{conj psi}(exp(-eta.t) phi)(x, -xi)| on the grid."""
    from .distributions import FunctionTerm

    f = TestDistribution((FunctionTerm(phi.reweighted(eta)),), psi.dim)
    return np.abs(stft(f, psi.conj(), grid, quad, xi_sign=-1.0).values)


def lemma2_suite(psi: Window, eta, ks, ns, phi: SchwartzTestFunction, grid: GridSpec = LEMMA2_GRID, quad: QuadSpec = QuadSpec(), lhs: np.ndarray | None = None) -> list[BoundReport]:
    """One report per (k, n): sampled |LHS| / RHS of the decay estimate."""
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    A = _lhs_field(psi, eta, phi, grid, quad) if lhs is None else lhs
    peak = float(np.max(A))
    d = grid.dim
    edge = np.abs(A).reshape((grid.n_x,) * d + (grid.n_xi,) * d)
    tail = max(max(float(np.max(np.take(edge, 0, axis=ax))), float(np.max(np.take(edge, -1, axis=ax)))) for ax in range(2 * d))
    if peak > 0 and tail > LEMMA2_TAIL * peak:
        raise GuardError(f"grid too small: boundary LHS is {tail / peak:.3e} of its peak")
    X, XI = grid.x_nodes(), grid.xi_nodes()
    nX = np.linalg.norm(X, axis=1)
    nXI = np.linalg.norm(XI, axis=1)
    out = []
    for k in ks:
        for n in ns:
            C = lemma2_constant(psi, eta, k, n, quad)
            norm = schwartz_norm(phi, k, n)
            rhs = C * np.exp(-X @ eta)[:, None] * norm / ((1 + nX) ** k)[:, None] / ((1 + nXI) ** n)[None, :]
            ratios = A / rhs
            shape = ratios.shape
            coords = lambda i, shape=shape: {"x": X[np.unravel_index(i, shape)[0]].tolist(), "xi": XI[np.unravel_index(i, shape)[1]].tolist()}
            out.append(_bound_report("lemma2", ratios, coords, C, k=k, n=n, eta=eta.tolist(), phi_norm=norm, tail_fraction=tail / peak if peak else 0.0))
    return out


# --------------------------------------------------------------------------
# ladders and membership


@dataclass(frozen=True)
class Ladder:
    """Nested symmetric windows |x_i| <= x0 * 2^j, |xi_i| <= xi0 * 2^j, j = 0..levels-1."""

    x0: float = 2.0
    xi0: float = 2.0
    levels: int = 4
    step_x: float = 0.125
    step_xi: float = 0.25

    def __post_init__(self):
        if self.levels < 3:
            raise ValueError("a ladder needs at least 3 windows")

    def halves(self) -> list[tuple[float, float]]:
        return [(self.x0 * 2**j, self.xi0 * 2**j) for j in range(self.levels)]

    def outer_grid(self, dim: int = 1) -> GridSpec:
        xh, kh = self.halves()[-1]
        return GridSpec.symmetric(xh, kh, int(round(2 * xh / self.step_x)) + 1, int(round(2 * kh / self.step_xi)) + 1, dim)

    def x_nodes(self, dim: int = 1) -> np.ndarray:
        return self.outer_grid(dim).x_nodes()

    def to_json(self) -> dict:
        return {"x0": self.x0, "xi0": self.xi0, "levels": self.levels, "step_x": self.step_x, "step_xi": self.step_xi}


def _window_sups(L: np.ndarray, X: np.ndarray, XI: np.ndarray | None, ladder: Ladder) -> list[float]:
    """Sups of exp(L) over the nested ladder windows (L given in log space)."""
    out = []
    for xh, kh in ladder.halves():
        mx = np.all(np.abs(X) <= xh + 1e-12, axis=1)
        if XI is None:
            sub = L[mx]
        else:
            mk = np.all(np.abs(XI) <= kh + 1e-12, axis=1)
            sub = L[np.ix_(mx, mk)]
        m = float(np.max(sub)) if sub.size else -np.inf
        out.append(float(np.exp(m)) if np.isfinite(m) else 0.0)
    return out


def _log_abs(A) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(A))


def membership_ladder(f: TestDistribution, K: cg.ConvexBody, psi: Window, v: Weight, ladder: Ladder = Ladder(), quad: QuadSpec = QuadSpec(), F: TimeFrequencyField | None = None) -> MembershipVerdict:
    """Trend of sup |V_psi f| exp(h_{-K}(x)) v(xi) on the ladder (no region precondition)."""
    grid = ladder.outer_grid(f.dim)
    F = stft(f, psi, grid, quad) if F is None else F
    X, XI = grid.x_nodes(), grid.xi_nodes()
    L = _log_abs(F.values) + np.asarray(cg.Reflected(K).h(X))[:, None] + v.log(XI)[None, :]
    sups = _window_sups(L, X, XI, ladder)
    return MembershipVerdict(trend_verdict(sups), sups, ladder.halves())


def _proof_bound(f, K, eps, psi, v, grid, F, quad):
    """Per-node chain: |V f| e^{h_{-K}} v <= e |<e^{-tau.t} f, e^{tau.(t-x)} conj(M T psi)>| e^{-eps|x|} v."""
    X, XI = grid.x_nodes(), grid.xi_nodes()
    axes = grid.xi_axes()
    lhs = np.abs(F.values) * np.exp(np.asarray(cg.Reflected(K).h(X)))[:, None] * v(XI)[None, :]
    elem = np.zeros_like(lhs)
    for i, x in enumerate(X):
        eta_x = K.argmax(-x)
        nx = np.linalg.norm(x)
        tau = eta_x - eps * x / nx if nx > 0 else eta_x
        row = stft_row(f.reweighted(tau), TiltedWindow(psi, tuple(tau)), x, axes, quad)
        elem[i] = np.abs(row) * math.exp(-eps * nx) * v(XI)
    return lhs, elem


def gamma_membership(f: TestDistribution, region: cg.OpenConvexRegion, psi: Window, v: Weight, ladder: Ladder = Ladder(), N_max: int = 6, quad: QuadSpec = QuadSpec(), tol: float = BOUND_TOL) -> dict:
    """Ladder verdicts for every K_N of an exhaustion of ``region`` plus the proof bound check."""
    Gf = f.region()
    N0 = cg.min_exhaustion_index(region)
    bodies = {N: cg.exhaust(region, N) for N in range(N0, N_max + 1)}
    for N, K in bodies.items():
        if not cg.region_contains_body(Gf, K):
            raise ValueError(f"region is not inside the region of f (K_{N} escapes)")
    grid = ladder.outer_grid(f.dim)
    F = stft(f, psi, grid, quad)
    rows = []
    for N, K in bodies.items():
        verdict = membership_ladder(f, K, psi, v, ladder, quad, F)
        margin = cg.fatten_margin(Gf, K)
        eps = min(1.0, 0.5 * margin)
        if f.is_zero:
            lhs = elem = np.zeros_like(F.values, dtype=float)
        else:
            lhs, elem = _proof_bound(f, K, eps, psi, v, grid, F, quad)
        p_est = float(np.max(elem))
        bound = math.e * p_est
        # pointwise chain and the global bound e * p_{K_eps, B}(f)
        pointwise = lhs <= math.e * elem * (1 + tol) + 1e-300
        global_ok = lhs <= bound * (1 + tol) + 1e-300
        rows.append(
            {
                "N": N,
                "body": K.to_json(),
                "eps": eps,
                "trend": verdict.trend,
                "sups": verdict.sups,
                "sampled_norm": float(np.max(lhs)),
                "proof_bound": bound,
                "pointwise_violations": int(np.sum(~pointwise)),
                "bound_violations": int(np.sum(~global_ok)),
            }
        )
    ok = all(r["trend"] == "bounded" and r["bound_violations"] == 0 and r["pointwise_violations"] == 0 for r in rows)
    return {"passed": ok, "windows": ladder.halves(), "rows": rows}


def adjoint_constant(d: int, eps: float) -> float:
    """int exp(-eps |x|) dx * int (1 + |xi|)^-(d+1) dxi over R^d, in closed form."""
    surface = {1: 2.0, 2: 2 * math.pi, 3: 4 * math.pi}[d]
    return surface * math.gamma(d) / eps**d * surface / d


def default_family(dim: int = 1) -> list[SchwartzTestFunction]:
    """Gaussian test functions used as the default bounded set."""
    from .functions import Poly

    out = [SchwartzTestFunction(sigma=1.0, dim=dim)]
    for i in range(dim):
        out.append(SchwartzTestFunction(Poly.coordinate(i, dim), sigma=1.0, dim=dim))
    return out


def adjoint_bound_suite(F: TimeFrequencyField, region: cg.OpenConvexRegion, psi: Window, K_index: int, eps: float, B=None, v0: Weight | None = None, eta_samples: int = 4, seed: int = 0, quad: QuadSpec = QuadSpec(), tol: float = BOUND_TOL) -> BoundReport:
    """p_{K,B}(V* F) <= C ||F||_{K_eps, w} with w = v0 (1 + |xi|)^(d+1)."""
    d = F.grid.dim
    B = default_family(d) if B is None else list(B)
    K = cg.exhaust(region, K_index)
    Ke = cg.fatten(K, eps)
    if not cg.contains(Ke, cg.exhaust(region, K_index + 1)).certified:
        raise ValueError("eps too large: the fattened body escapes the next exhaustion body")
    n = d + 1
    if v0 is None:
        A = lemma2_sup_constant(psi, K, 0, n, quad) * max((schwartz_norm(phi, 0, n) for phi in B), default=0.0)
        v0 = ConstantWeight(A) * PolyInvWeight(n) if A > 0 else None
    if v0 is None:
        return BoundReport("adjoint", 0, 0.0, [], 0.0, tol)
    from .weights import PolyWeight

    w = v0 * PolyWeight(d + 1)
    C = adjoint_constant(d, eps)
    rhs = C * tf_weighted_norm(F, Ke, w)
    lhs = 0.0
    if np.any(F.values) and B:
        for eta in cg.eta_lattice(K, eta_samples, seed):
            for phi in B:
                lhs = max(lhs, abs(adjoint_apply(F, psi, phi.reweighted(eta), quad)))
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else np.inf)
    rep = _bound_report("adjoint", np.array([ratio]), lambda i: {"K_index": K_index}, C, tol, lhs=lhs, rhs=rhs, eps=eps)
    return rep


def tensor_membership_scan(F: TimeFrequencyField, W: WeightSystem, V: WeightSystem, ladder: Ladder | None = None) -> MembershipVerdict:
    """For each N, the first n with sup |F| w_N(x) v_n(xi) bounded on the ladder."""
    grid = F.grid
    X, XI = grid.x_nodes(), grid.xi_nodes()
    if ladder is None:
        xh, kh = grid.x_max[0], grid.xi_max[0]
        ladder = Ladder(xh / 8, kh / 8, 4)
    LF = _log_abs(F.values)
    table, last = [], []
    for N in W.indices:
        wit = None
        for n in V.indices:
            L = LF + W[N].log(X)[:, None] + V[n].log(XI)[None, :]
            sups = _window_sups(L, X, XI, ladder)
            if trend_verdict(sups) == "bounded":
                wit = {"N": N, "n": n, "sups": sups}
                break
            last = sups
        table.append(wit or {"N": N, "n": None, "sups": last})
    trend = "bounded" if all(r["n"] is not None for r in table) else "inconclusive"
    return MembershipVerdict(trend, table[-1]["sups"], ladder.halves(), table)


def convolutor_suite(f: TestDistribution, phis, W: WeightSystem, ladder: Ladder = Ladder(), require_membership: bool = True, quad: QuadSpec = QuadSpec()) -> MembershipVerdict:
    """Trend of sup |(f * phi)(x)| w_N(x) on the ladder for each phi and N."""
    if require_membership:
        Gf = f.region()
        for N, K in W.bodies.items():
            if not cg.region_contains_body(Gf, K):
                raise ValueError(f"weight system region is not inside the region of f (K_{N} escapes)")
    X = ladder.x_nodes(f.dim)
    table = []
    for j, phi in enumerate(phis):
        vals = convolve(f, phi, X, quad)
        LF = _log_abs(vals)
        for N in W.indices:
            sups = _window_sups(LF + W[N].log(X), X, None, ladder)
            table.append({"phi": j, "N": N, "trend": trend_verdict(sups), "sups": sups})
    trends = {r["trend"] for r in table}
    trend = "bounded" if trends == {"bounded"} else ("diverging" if "diverging" in trends else "inconclusive")
    return MembershipVerdict(trend, table[-1]["sups"] if table else [], ladder.halves(), table)

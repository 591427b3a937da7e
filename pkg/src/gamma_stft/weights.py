"""Weights, weight systems and checkers for their structural conditions.

All weights are evaluated in log space so that exponential weights can be
probed at radii far beyond the range of floating point exponentials.

Verdicts are three-valued in spirit: ``certified`` (an exact argument),
``numerically-supported`` (a trend on expanding spheres or balls),
``falsified`` (a stored, replayable violation) and ``undetermined``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import convex as cg
from .quadrature import QuadSpec, integrate_box, sphere_rule

__all__ = [
    "Weight",
    "PolyWeight",
    "PolyInvWeight",
    "ExpSupportWeight",
    "PowerExpWeight",
    "ConstantWeight",
    "ProductWeight",
    "QuotientWeight",
    "weight_from_json",
    "WeightSystem",
    "exp_weight_system",
    "pol_system",
    "system_from_json",
    "ConditionReport",
    "CERTIFIED",
    "SUPPORTED",
    "FALSIFIED",
    "UNDETERMINED",
    "check_monotone",
    "check_V",
    "check_L1",
    "check_trans_inv",
    "check_omega_switched",
    "nachbin_member",
    "DEFAULT_THETA_GRID",
]

CERTIFIED = "certified"
SUPPORTED = "numerically-supported"
FALSIFIED = "falsified"
UNDETERMINED = "undetermined"

RATIO_THRESHOLD = 1e-6
CAUCHY_TOL = 1e-8
STABLE = 0.05
DEFAULT_THETA_GRID = tuple(round(0.01 * k, 2) for k in range(1, 51))


def _points(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return X[:, None] if X.ndim == 1 else X


def _norm(X) -> np.ndarray:
    return np.linalg.norm(X, axis=1)


# --------------------------------------------------------------------------
# weights


class Weight:
    """A positive continuous function on R^d, evaluated through its logarithm."""

    def log(self, X) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, X) -> np.ndarray:
        return np.exp(self.log(_points(X)))

    def __mul__(self, other: "Weight") -> "Weight":
        return ProductWeight((self, other))

    def __truediv__(self, other: "Weight") -> "Weight":
        return QuotientWeight(self, other)


@dataclass(frozen=True)
class PolyWeight(Weight):
    """(1 + |x|)^k."""

    k: float

    def log(self, X):
        return self.k * np.log1p(_norm(_points(X)))

    def to_json(self):
        return {"type": "poly", "k": self.k}


@dataclass(frozen=True)
class PolyInvWeight(Weight):
    """(1 + |x|)^(-N)."""

    N: float

    def log(self, X):
        return -self.N * np.log1p(_norm(_points(X)))

    def to_json(self):
        return {"type": "poly_inv", "N": self.N}


@dataclass(frozen=True, eq=False)
class ExpSupportWeight(Weight):
    """exp(h_K(x)) for a compact convex body K."""

    body: cg.ConvexBody

    def log(self, X):
        return np.asarray(self.body.h(_points(X)), dtype=float)

    def to_json(self):
        return {"type": "exp_support", "body": self.body.to_json()}


@dataclass(frozen=True)
class PowerExpWeight(Weight):
    """exp(max(|x|, 1)^a)."""

    a: float

    def log(self, X):
        return np.maximum(_norm(_points(X)), 1.0) ** self.a

    def to_json(self):
        return {"type": "power_exp", "a": self.a}


@dataclass(frozen=True)
class ConstantWeight(Weight):
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("constant weight must be positive")

    def log(self, X):
        return np.full(_points(X).shape[0], math.log(self.c))

    def to_json(self):
        return {"type": "constant", "c": self.c}


@dataclass(frozen=True, eq=False)
class ProductWeight(Weight):
    factors: tuple

    def log(self, X):
        return sum(f.log(X) for f in self.factors)

    def to_json(self):
        return {"type": "product", "factors": [f.to_json() for f in self.factors]}


@dataclass(frozen=True, eq=False)
class QuotientWeight(Weight):
    num: Weight
    den: Weight

    def log(self, X):
        return self.num.log(X) - self.den.log(X)

    def to_json(self):
        return {"type": "quotient", "num": self.num.to_json(), "den": self.den.to_json()}


def weight_from_json(obj: dict) -> Weight:
    kind = obj.get("type")
    if kind == "poly":
        return PolyWeight(float(obj["k"]))
    if kind == "poly_inv":
        return PolyInvWeight(float(obj["N"]))
    if kind == "exp_support":
        return ExpSupportWeight(cg.body_from_json(obj["body"]))
    if kind == "power_exp":
        return PowerExpWeight(float(obj["a"]))
    if kind == "constant":
        return ConstantWeight(float(obj.get("c", 1.0)))
    if kind == "product":
        return ProductWeight(tuple(weight_from_json(f) for f in obj["factors"]))
    if kind == "quotient":
        return QuotientWeight(weight_from_json(obj["num"]), weight_from_json(obj["den"]))
    raise ValueError(f"unknown weight type {kind!r}")


# --------------------------------------------------------------------------
# systems


@dataclass(eq=False)
class WeightSystem:
    """Indexed family of weights, increasing or decreasing in the index.

    ``origin`` is ``"exponential"`` for systems exp(h_{-K_N}) built from an
    exhaustion (``bodies`` then holds K_N), ``"constant"`` for w_N = 1, and
    ``"user"`` otherwise.
    """

    kind: str
    weights: dict
    dim: int = 1
    origin: str = "user"
    region: cg.OpenConvexRegion | None = None
    bodies: dict = field(default_factory=dict)
    label: str = ""
    certificates: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in ("increasing", "decreasing"):
            raise ValueError("kind must be 'increasing' or 'decreasing'")
        if not self.weights:
            raise ValueError("a weight system needs at least one weight")
        self.weights = dict(sorted(self.weights.items()))

    @property
    def indices(self) -> list[int]:
        return list(self.weights)

    def __getitem__(self, N: int) -> Weight:
        return self.weights[N]

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "origin": self.origin,
            "dim": self.dim,
            "indices": self.indices,
            "weights": {str(N): w.to_json() for N, w in self.weights.items()},
        }
        if self.region is not None:
            out["region"] = self.region.to_json()
        if self.label:
            out["label"] = self.label
        return out


def exp_weight_system(region: cg.OpenConvexRegion, N_max: int) -> WeightSystem:
    """w_N = exp(h_{-K_N}) for N0 <= N <= N_max, with nestedness certificates."""
    N0 = cg.min_exhaustion_index(region)
    if N_max < N0:
        raise ValueError(f"exhaustion index too small: N_max={N_max} < N0={N0}")
    bodies = {N: cg.exhaust(region, N) for N in range(N0, N_max + 1)}
    weights = {N: ExpSupportWeight(cg.Reflected(K)) for N, K in bodies.items()}
    certs = []
    for N in range(N0, N_max):
        rep = cg.contains(bodies[N], bodies[N + 1])
        if not rep.certified:
            raise RuntimeError(f"exhaustion bodies K_{N}, K_{N + 1} are not certifiably nested")
        certs.append({"N": N, "certificate": rep.certificate})
    return WeightSystem("increasing", weights, region.dim, "exponential", region, bodies, certificates=certs)


def pol_system(N_max: int, dim: int = 1) -> WeightSystem:
    """The decreasing system ((1 + |x|)^(-N))_{N = 0..N_max}."""
    return WeightSystem("decreasing", {N: PolyInvWeight(N) for N in range(N_max + 1)}, dim, "user", label="pol")


def system_from_json(obj: dict) -> WeightSystem:
    """Build a system from a JSON descriptor.

    Families: ``exponential`` (needs ``region``), ``pol`` (decreasing),
    ``poly`` ((1+|x|)^N), ``constant``, ``exp_norm`` (exp(N|x|), treated as a
    user system), ``power_exp`` (exp(max(|x|,1)^(2-1/N))). Alternatively give
    ``weights`` as a list of weight descriptors indexed from ``start``.
    """
    dim = int(obj.get("dim", 1))
    N_max = int(obj.get("N_max", 8))
    family = obj.get("family")
    if family == "exponential":
        return exp_weight_system(cg.region_from_json(obj["region"]), N_max)
    if family == "pol":
        return pol_system(N_max, dim)
    start = int(obj.get("start", 1))
    idx = range(start, N_max + 1)
    if family == "poly":
        return WeightSystem("increasing", {N: PolyWeight(N) for N in idx}, dim, label="poly")
    if family == "constant":
        return WeightSystem("increasing", {N: ConstantWeight(1.0) for N in idx}, dim, "constant", label="constant")
    if family == "exp_norm":
        ws = {N: ExpSupportWeight(cg.Ball(np.zeros(dim), float(N))) for N in idx}
        return WeightSystem("increasing", ws, dim, label="exp_norm")
    if family == "power_exp":
        return WeightSystem("increasing", {N: PowerExpWeight(2.0 - 1.0 / N) for N in idx}, dim, label="power_exp")
    if "weights" in obj:
        ws = {start + i: weight_from_json(w) for i, w in enumerate(obj["weights"])}
        return WeightSystem(obj.get("kind", "increasing"), ws, dim, label=obj.get("label", ""))
    raise ValueError(f"unknown weight-system family {family!r}")


# --------------------------------------------------------------------------
# reports


@dataclass
class ConditionReport:
    condition: str
    verdict: str
    witnesses: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict in (CERTIFIED, SUPPORTED)

    def to_json(self) -> dict:
        return {"condition": self.condition, "verdict": self.verdict, "witnesses": self.witnesses, "diagnostics": self.diagnostics}


def _combine(verdicts: list[str]) -> str:
    if FALSIFIED in verdicts:
        return FALSIFIED
    if UNDETERMINED in verdicts or not verdicts:
        return UNDETERMINED
    return CERTIFIED if all(v == CERTIFIED for v in verdicts) else SUPPORTED


def _default_radii() -> np.ndarray:
    return np.geomspace(1.0, 1e8, 33)


def _sphere_max(logf, radii, dirs) -> np.ndarray:
    """max over probe directions of logf at each radius."""
    R = np.asarray(radii, dtype=float)
    X = (R[:, None, None] * dirs[None, :, :]).reshape(-1, dirs.shape[1])
    return logf(X).reshape(R.size, dirs.shape[0]).max(axis=1)


def _check_radii(radii) -> np.ndarray:
    r = np.asarray(radii, dtype=float)
    if r.size < 3 or np.any(np.diff(r) <= 0):
        raise ValueError("radii must be strictly increasing with at least 3 entries")
    return r


def check_monotone(system: WeightSystem, n: int = 10_000, seed: int = 0, scale: float = 50.0) -> ConditionReport:
    """Sampled check of w_N <= w_{N+1} (increasing) or v_{N+1} <= v_N (decreasing)."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, system.dim)) * rng.uniform(0, scale, (n, 1))
    worst, where = -np.inf, None
    idx = system.indices
    for a, b in zip(idx, idx[1:]):
        lo, hi = (a, b) if system.kind == "increasing" else (b, a)
        gap = system[lo].log(X) - system[hi].log(X)
        tol = np.log1p(1e-12)
        k = int(np.argmax(gap))
        if gap[k] > worst:
            worst, where = float(gap[k]), {"N": a, "x": X[k].tolist()}
        if gap[k] > tol:
            return ConditionReport("Monotone", FALSIFIED, [where], {"log_gap": float(gap[k])})
    return ConditionReport("Monotone", SUPPORTED, [], {"max_log_gap": worst, "samples": n})


# -- (V) / (1)


def check_V(system: WeightSystem, radii=None, dirs=None, seed: int = 0) -> ConditionReport:
    """Limit condition: v_M/v_N -> 0 (decreasing) or w_N/w_M -> 0 (increasing)."""
    radii = _check_radii(_default_radii() if radii is None else radii)
    dirs = cg.probe_directions(system.dim, 64, seed) if dirs is None else dirs
    witnesses, verdicts, traces = [], [], {}
    idx = system.indices
    for N in idx[:-1]:
        found, all_stuck = None, True
        for M in [m for m in idx if m > N]:
            num, den = (system[M], system[N]) if system.kind == "decreasing" else (system[N], system[M])
            trace = np.exp(_sphere_max(lambda X: num.log(X) - den.log(X), radii, dirs))
            traces[f"{N},{M}"] = trace.tolist()
            decreasing = bool(np.all(np.diff(trace) <= 1e-12 * np.maximum(trace[:-1], 1e-300)))
            if decreasing and trace[-1] < RATIO_THRESHOLD:
                found = {"N": N, "M": M, "ratio_at_max_radius": float(trace[-1])}
                break
            stuck = bool(np.all(np.diff(trace) >= -1e-12 * trace[:-1]) and trace.min() >= RATIO_THRESHOLD)
            all_stuck = all_stuck and stuck
        if found:
            witnesses.append({**found, "verdict": SUPPORTED})
            verdicts.append(SUPPORTED)
        elif all_stuck:
            witnesses.append({"N": N, "M": None, "violation": "ratio bounded below for every M", "verdict": FALSIFIED})
            verdicts.append(FALSIFIED)
        else:
            witnesses.append({"N": N, "M": None, "diagnostic": "exhausted indices", "verdict": UNDETERMINED})
            verdicts.append(UNDETERMINED)
    return ConditionReport("V", _combine(verdicts), witnesses, {"radii": radii.tolist(), "traces": traces})


# -- (2) integrability


def _ball_integrals(logf, dim: int, shells, quad: QuadSpec) -> np.ndarray:
    """Cumulative integrals of exp(logf) over balls of the given radii."""
    U, W = sphere_rule(dim)

    def radial(R):
        r = R[:, 0]
        X = (r[:, None, None] * U[None, :, :]).reshape(-1, dim)
        vals = np.exp(logf(X)).reshape(r.size, U.shape[0])
        return vals @ W * r ** (dim - 1)

    out, total, lo = [], 0.0, 0.0
    for hi in shells:
        total += float(integrate_box(radial, [lo], [hi], quad))
        out.append(total)
        lo = hi
    return np.array(out)


def check_L1(system: WeightSystem, quad: QuadSpec = QuadSpec(order=16, panels=8, rtol=1e-12), shells=None) -> ConditionReport:
    """w_N / w_M in L1: partial integrals over doubling balls must settle."""
    if system.kind != "increasing":
        raise ValueError("condition (2) is stated for increasing systems")
    shells = np.array([2.0**j for j in range(0, 41)]) if shells is None else np.asarray(shells, dtype=float)
    witnesses, verdicts, traces = [], [], {}
    idx = system.indices
    for N in idx[:-1]:
        found = None
        for M in [m for m in idx if m > N]:
            I = _ball_integrals(lambda X: system[N].log(X) - system[M].log(X), system.dim, shells, quad)
            traces[f"{N},{M}"] = I.tolist()
            if np.isfinite(I[-1]) and I[-1] > 0 and (I[-1] - I[-2]) <= CAUCHY_TOL * I[-1]:
                found = {"N": N, "M": M, "integral": float(I[-1]), "last_increment": float(I[-1] - I[-2])}
                break
        if found:
            witnesses.append({**found, "verdict": SUPPORTED})
            verdicts.append(SUPPORTED)
        else:
            witnesses.append({"N": N, "M": None, "diagnostic": "exhausted indices", "verdict": UNDETERMINED})
            verdicts.append(UNDETERMINED)
    return ConditionReport("L1", _combine(verdicts), witnesses, {"shells": shells.tolist(), "partial_integrals": traces})


# -- (3) translation invariance


def _pair_samples(dim: int, n: int, seed: int, scale: float = 1e3) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)

    def draw():
        U = rng.standard_normal((n, dim))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        return U * np.expm1(rng.uniform(0, math.log1p(scale), (n, 1)))

    X, Y = draw(), draw()
    X[0], Y[0] = 0.0, 0.0
    return X, Y


def check_trans_inv(system: WeightSystem, n_samples: int = 10_000, seed: int = 0) -> ConditionReport:
    """w_N(x + y) <= C w_{M1}(x) w_{M2}(y)."""
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    idx = system.indices
    X, Y = _pair_samples(system.dim, n_samples, seed)
    if system.origin in ("exponential", "constant"):
        # exp(h(x + y)) <= exp(h(x)) exp(h(y)) by subadditivity of supporting functions
        worst = max(float(np.max(system[N].log(X + Y) - system[N].log(X) - system[N].log(Y))) for N in idx)
        wit = [{"N": N, "M1": N, "M2": N, "C": 1.0} for N in idx]
        return ConditionReport("TransInv", CERTIFIED, wit, {"sampled_max_log_excess": worst, "samples": n_samples})
    if len(idx) < 2:
        return ConditionReport("TransInv", UNDETERMINED, [], {"diagnostic": "exhausted indices"})
    witnesses, verdicts = [], []
    half = n_samples // 2
    for N in idx:
        best = None
        for M1 in [m for m in idx if m >= N]:
            for M2 in [m for m in idx if m >= N]:
                r = system[N].log(X + Y) - system[M1].log(X) - system[M2].log(Y)
                first, full = float(np.max(r[:half])), float(np.max(r))
                if full - first > math.log1p(STABLE):
                    continue
                if best is None or full < best["logC"] - 1e-12:
                    best = {"N": N, "M1": M1, "M2": M2, "logC": full}
        if best is None:
            witnesses.append({"N": N, "diagnostic": "no stabilized pair"})
            verdicts.append(UNDETERMINED)
        else:
            logC = best["logC"]
            best["C"] = math.exp(logC) if logC < 700 else math.inf
            witnesses.append(best)
            verdicts.append(SUPPORTED)
    return ConditionReport("TransInv", _combine(verdicts), witnesses, {"samples": n_samples})


# -- (8)


def _theta_max(KN, KP, KM) -> float:
    """Largest theta in [0, 1] with (1 - theta) K_N + theta K_P inside K_M (0 if none)."""
    hform = cg._as_hform(KM)
    if hform is not None:
        A, b = hform
        hN, hP = np.atleast_1d(KN.h(A)), np.atleast_1d(KP.h(A))
        if np.any(hN > b + cg.INCLUSION_TOL):
            return 0.0
        slope = hP - hN
        lim = np.where(slope > 0, (b - hN) / np.where(slope > 0, slope, 1.0), np.inf)
        return float(min(1.0, lim.min()))
    bN, bP, bM = cg._as_ball(KN), cg._as_ball(KP), cg._as_ball(KM)
    if bN and bP and bM and np.allclose(bN[0], bM[0]) and np.allclose(bP[0], bM[0]):
        rN, rP, rM = bN[1], bP[1], bM[1]
        if rN > rM:
            return 0.0
        return 1.0 if rP <= rM else float((rM - rN) / (rP - rN))
    return 0.0


def _omega_geometric(system: WeightSystem, theta_grid, P_max: int) -> ConditionReport:
    B = system.bodies
    idx = [N for N in system.indices if N <= P_max]
    witnesses, verdicts = [], []
    for N in idx[:-2]:
        chosen = None
        for M in [m for m in idx if N < m < P_max]:
            table = []
            for P in [p for p in idx if p >= M]:
                theta, tag = None, None
                for th in theta_grid:
                    comb = cg.MinkowskiSum((cg.Scaled(1 - th, B[N]), cg.Scaled(th, B[P])))
                    rep = cg.contains(comb, B[M])
                    if rep.certified:
                        theta, tag = th, rep.certificate
                        break
                if theta is None:
                    tmax = _theta_max(B[N], B[P], B[M])
                    if tmax > 0:
                        comb = cg.MinkowskiSum((cg.Scaled(1 - tmax, B[N]), cg.Scaled(tmax, B[P])))
                        rep = cg.contains(comb, B[M])
                        if rep.certified:
                            theta, tag = tmax, "interval-formula/" + str(rep.certificate)
                if theta is None:
                    break
                table.append({"P": P, "theta": theta, "C": 1.0, "certificate": tag})
            else:
                chosen = {"N": N, "M": M, "per_P": table}
                break
        if chosen:
            witnesses.append(chosen)
            verdicts.append(CERTIFIED)
        else:
            witnesses.append({"N": N, "diagnostic": "exhausted indices"})
            verdicts.append(UNDETERMINED)
    return ConditionReport("OmegaSwitched", _combine(verdicts), witnesses, {"mode": "geometric", "P_max": P_max})


def _log_trace(system, N, M, P, theta, radii, dirs) -> np.ndarray:
    f = lambda X: (1 - theta) * system[N].log(X) + theta * system[P].log(X) - system[M].log(X)
    return _sphere_max(f, radii, dirs)


def _trace_bounded(L: np.ndarray) -> bool:
    h = L.size // 2
    return bool(np.max(L[h:]) <= np.max(L[:h]) + math.log1p(STABLE))


def _trace_diverges(L: np.ndarray) -> bool:
    tail = L[-3:]
    return bool(np.all(np.diff(tail) > 0) and tail[-1] > 50.0)


def _omega_sampled(system: WeightSystem, theta_grid, P_max: int, radii, dirs) -> ConditionReport:
    idx = [N for N in system.indices if N <= P_max]
    witnesses, verdicts, diag = [], [], {}
    for N in idx[:-2]:
        chosen, dead_M = None, []
        for M in [m for m in idx if N < m < P_max]:
            table, hopeless = [], False
            for P in [p for p in idx if p > M]:
                pick, all_div = None, True
                for th in theta_grid:
                    L = _log_trace(system, N, M, P, th, radii, dirs)
                    if _trace_bounded(L):
                        top = max(float(np.max(L)), float(_log_trace(system, N, M, P, th, [0.0], dirs[:1])[0]))
                        pick = {"P": P, "theta": th, "C": float(math.exp(min(top, 700.0)))}
                        break
                    all_div = all_div and _trace_diverges(L)
                if pick is None:
                    hopeless = all_div
                    if all_div:
                        Lw = _log_trace(system, N, M, P, theta_grid[0], radii, dirs)
                        diag[f"{N},{M},{P}"] = {"theta": theta_grid[0], "log_ratio_tail": Lw[-3:].tolist(), "radii_tail": radii[-3:].tolist()}
                    break
                table.append(pick)
            else:
                chosen = {"N": N, "M": M, "per_P": table}
                break
            if hopeless:
                dead_M.append(M)
        if chosen:
            witnesses.append(chosen)
            verdicts.append(SUPPORTED)
        elif len(dead_M) == len([m for m in idx if N < m < P_max]):
            witnesses.append({"N": N, "violation": "log-ratio diverges for every M and theta", "M_tested": dead_M})
            verdicts.append(FALSIFIED)
        else:
            witnesses.append({"N": N, "diagnostic": "exhausted indices"})
            verdicts.append(UNDETERMINED)
    return ConditionReport("OmegaSwitched", _combine(verdicts), witnesses, {"mode": "sampled", "P_max": P_max, "divergence": diag})


def check_omega_switched(system: WeightSystem, theta_grid=DEFAULT_THETA_GRID, P_max: int | None = None, radii=None, seed: int = 0) -> ConditionReport:
    """Condition (8): w_N^(1-theta) w_P^theta <= C w_M."""
    if not theta_grid or any(not 0 < t < 1 for t in theta_grid):
        raise ValueError("theta grid must be a non-empty list inside (0, 1)")
    P_max = max(system.indices) if P_max is None else int(P_max)
    if P_max > max(system.indices):
        raise ValueError("P_max exceeds the largest index of the system")
    if system.origin == "exponential":
        return _omega_geometric(system, theta_grid, P_max)
    if system.origin == "constant":
        idx = system.indices
        wit = [{"N": N, "M": N + 1, "per_P": [{"P": P, "theta": theta_grid[0], "C": 1.0} for P in idx if P > N]} for N in idx[:-1]]
        return ConditionReport("OmegaSwitched", CERTIFIED, wit, {"mode": "constant"})
    radii = np.geomspace(1.0, 1e150, 61) if radii is None else _check_radii(radii)
    dirs = cg.probe_directions(system.dim, 64, seed)
    return _omega_sampled(system, theta_grid, P_max, radii, dirs)


def replay_omega(system: WeightSystem, witness: dict, n: int = 10_000, seed: int = 1, scale: float = 1e3) -> int:
    """Count sampled violations of a stored (N, M, P, theta, C) witness."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, system.dim)) * np.expm1(rng.uniform(0, math.log1p(scale), (n, 1)))
    N, M = witness["N"], witness["M"]
    bad = 0
    for row in witness["per_P"]:
        lhs = (1 - row["theta"]) * system[N].log(X) + row["theta"] * system[row["P"]].log(X)
        rhs = math.log(row["C"]) + system[M].log(X)
        bad += int(np.sum(lhs > rhs + 1e-9 * np.maximum(1.0, np.abs(rhs))))
    return bad


__all__ += ["replay_omega"]


# -- Nachbin membership


def nachbin_member(v: Weight, V: WeightSystem, radii=None, dim: int | None = None, seed: int = 0) -> ConditionReport:
    """sup_x v(x) / v_N(x) < infinity for every N, judged by trends on spheres."""
    radii = _check_radii(_default_radii() if radii is None else radii)
    dirs = cg.probe_directions(dim or V.dim, 64, seed)
    witnesses, verdicts = [], []
    for N in V.indices:
        f = lambda X: v.log(X) - V[N].log(X)
        L = _sphere_max(f, radii, dirs)
        sups = np.exp(np.minimum(L, 700.0))
        running = np.maximum.accumulate(np.maximum(L, f(np.zeros((1, dirs.shape[1])))[0]))
        if _trace_bounded(running):
            witnesses.append({"N": N, "sup": float(np.exp(min(running[-1], 700.0)))})
            verdicts.append(SUPPORTED)
        elif np.all(np.diff(L[-3:]) > math.log(1.5)):
            witnesses.append({"N": N, "violation": "sup diverges", "radii_tail": radii[-3:].tolist(), "sups_tail": sups[-3:].tolist()})
            verdicts.append(FALSIFIED)
        else:
            witnesses.append({"N": N, "diagnostic": "inconclusive trend"})
            verdicts.append(UNDETERMINED)
    return ConditionReport("Nachbin", _combine(verdicts), witnesses, {"radii": radii.tolist()})

"""Command-line front end: runs the verification suites and writes JSON/CSV reports.

Exit codes: 0 every suite in scope passed, 1 some suite failed, 2 malformed
configuration (the message names the offending key), 3 a numerical guard
tripped (grid or box too small, quadrature did not converge).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import SCHEMA
from . import convex as cg
from .distributions import distribution_from_json
from .functions import SchwartzTestFunction, Window, function_from_json
from .quadrature import QuadratureError, QuadSpec
from .seminorms import (
    GuardError,
    Ladder,
    adjoint_bound_suite,
    convolutor_suite,
    default_family,
    gamma_membership,
    lemma1_suite,
    lemma2_suite,
    membership_ladder,
)
from .seminorms import LEMMA2_GRID, _lhs_field
from .stft import DEFAULT_GRID, ISOMETRY_GRID, GridSpec, GridTooSmall, TimeFrequencyField, isometry_gap, reconstruct_error, stft
from .weights import (
    CERTIFIED,
    SUPPORTED,
    PolyInvWeight,
    check_L1,
    check_monotone,
    check_omega_switched,
    check_trans_inv,
    check_V,
    exp_weight_system,
    system_from_json,
    weight_from_json,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2, 3
COMMANDS = ("check-weights", "stft-verify", "lemma-verify", "gamma-certify", "convolutor-check", "report")


class ConfigError(ValueError):
    def __init__(self, key: str, reason: str):
        super().__init__(f"malformed config at {key!r}: {reason}")
        self.key = key


class _Config:
    """Typed access to a JSON config; every failure names its key."""

    def __init__(self, data: dict, prefix: str = ""):
        if not isinstance(data, dict):
            raise ConfigError(prefix or "<root>", "expected an object")
        self.data = data
        self.prefix = prefix

    def _key(self, key):
        return f"{self.prefix}.{key}" if self.prefix else str(key)

    def get(self, key, parse, default=None):
        if key not in self.data:
            return default
        try:
            return parse(self.data[key])
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ConfigError(self._key(key), str(exc) or type(exc).__name__) from None

    def items(self, key, parse, default=()):
        raw = self.data.get(key)
        if raw is None:
            return list(default)
        if not isinstance(raw, list):
            raise ConfigError(self._key(key), "expected a list")
        out = []
        for i, item in enumerate(raw):
            try:
                out.append(parse(item))
            except (KeyError, TypeError, ValueError, IndexError) as exc:
                raise ConfigError(f"{self._key(key)}[{i}]", str(exc) or type(exc).__name__) from None
        return out

    def sub(self, key) -> "_Config":
        return _Config(self.data.get(key, {}), self._key(key))


def _ladder(cfg: _Config, levels: int | None) -> Ladder:
    sub = cfg.sub("ladder")
    kw = {k: sub.get(k, float) for k in ("x0", "xi0", "step_x", "step_xi") if k in sub.data}
    n = levels if levels is not None else sub.get("levels", int, 4)
    try:
        return Ladder(levels=n, **kw)
    except ValueError as exc:
        raise ConfigError("ladder", str(exc)) from None


def _flag(x) -> bool:
    if not isinstance(x, bool):
        raise ValueError("expected true or false")
    return x


def _positive(x) -> float:
    x = float(x)
    if not x > 0:
        raise ValueError("must be > 0")
    return x


# -- commands


def cmd_check_weights(cfg: _Config, args) -> dict:
    systems = cfg.items("systems", system_from_json)
    if not systems:
        region = cfg.get("region", cg.region_from_json, cg.open_interval(0.0, math.inf))
        N_max = cfg.get("N_max", int, 8)
        try:
            systems = [exp_weight_system(region, N_max)]
        except ValueError as exc:
            raise ConfigError("N_max", str(exc)) from None
    results, ok = [], True
    for S in systems:
        reports = [
            check_monotone(S, seed=args.seed),
            check_V(S, seed=args.seed),
            check_L1(S),
            check_trans_inv(S, seed=args.seed),
            check_omega_switched(S, seed=args.seed),
        ]
        passed = all(r.verdict in (CERTIFIED, SUPPORTED) for r in reports)
        ok &= passed
        results.append({"system": S.to_json(), "passed": passed, "conditions": [r.to_json() for r in reports]})
    return {"passed": ok, "results": results}


def cmd_stft_verify(cfg: _Config, args) -> dict:
    dists = cfg.items("f", distribution_from_json)
    if not dists:
        raise ConfigError("f", "at least one distribution is required")
    psi = cfg.get("window", function_from_json, Window(1.0, 1))
    gamma = cfg.get("synthesis_window", function_from_json, psi)
    phi = cfg.get("phi", function_from_json, Window(1.0, psi.dim, center=(0.3,) * psi.dim))
    grid = cfg.get("grid", GridSpec.from_json, DEFAULT_GRID)
    iso_grid = cfg.get("isometry_grid", GridSpec.from_json, ISOMETRY_GRID)
    limit = cfg.get("reconstruction_limit", _positive, 1e-3)
    gap_limit = cfg.get("isometry_limit", _positive, 1e-2)
    refine = cfg.get("refine", _flag, True)
    rows, ok = [], True
    for f in dists:
        row = {"f": f.to_json()}
        err = reconstruct_error(f, psi, gamma, phi, grid)
        row["reconstruction_error"] = err
        passed = err < limit
        if refine:
            err2 = reconstruct_error(f, psi, gamma, phi, grid.doubled())
            row["reconstruction_error_doubled"] = err2
            passed &= err2 < err or err == 0.0
        if f.is_l2():
            gap = isometry_gap(f, psi, iso_grid)
            row["isometry_gap"] = gap
            passed &= gap < gap_limit
            if refine:
                gap2 = isometry_gap(f, psi, iso_grid.refined())
                row["isometry_gap_refined"] = gap2
                passed &= gap2 < gap or gap == 0.0
        row["passed"] = bool(passed)
        ok &= passed
        rows.append(row)
    field = stft(dists[0], psi, grid)
    return {"passed": ok, "results": rows, "field": _field_json(field)}


def _lemma1(cfg: _Config, args) -> dict:
    sub = cfg.sub("lemma1")
    bodies = sub.items("bodies", cg.body_from_json, [cg.point([0.0]), cg.interval(0.5, 1.5), cg.box([0.0, 0.0], [1.0, 1.0])])
    eps = sub.get("eps", _positive, 1.0)
    v = sub.get("v", weight_from_json, PolyInvWeight(2))
    kn = sub.items("kn", lambda p: (int(p[0]), int(p[1])), [(k, n) for k in range(3) for n in range(3)])
    radius = sub.get("window_radius", _positive, 1.0)
    reps = []
    for K in bodies:
        psi = Window(radius, K.dim)
        for k, n in kn:
            r = lemma1_suite(psi, K, eps, v, k, n, seed=args.seed)
            r.tol = args.tol
            reps.append({"body": K.to_json(), **r.to_json(), "passed": r.max_ratio <= 1 + args.tol})
    return {"passed": all(r["passed"] for r in reps), "results": reps, "max_ratio": max(r["max_ratio"] for r in reps)}


def _lemma2(cfg: _Config, args) -> dict:
    sub = cfg.sub("lemma2")
    etas = sub.items("etas", float, [0.0, 1.0, -1.0])
    ks = sub.items("ks", int, [0, 1, 2])
    ns = sub.items("ns", int, [0, 1, 2])
    psi = sub.get("window", function_from_json, Window(1.0, 1))
    phi = sub.get("phi", function_from_json, SchwartzTestFunction(sigma=1.0, dim=1))
    grid = sub.get("grid", GridSpec.from_json, LEMMA2_GRID)
    reps, first = [], None
    for eta in etas:
        lhs = _lhs_field(psi, np.array([eta]), phi, grid, QuadSpec())
        if first is None:
            first = TimeFrequencyField(grid, lhs, {"eta": eta})
        for r in lemma2_suite(psi, [eta], ks, ns, phi, grid, lhs=lhs):
            reps.append({**r.to_json(), "passed": r.max_ratio <= 1 + args.tol})
    out = {"passed": all(r["passed"] for r in reps), "results": reps, "max_ratio": max(r["max_ratio"] for r in reps)}
    out["non_vacuous"] = out["max_ratio"] > 1e-6
    out["field"] = _field_json(first)
    return out


def cmd_lemma_verify(cfg: _Config, args) -> dict:
    return _lemma1(cfg, args) if args.lemma == 1 else _lemma2(cfg, args)


def cmd_gamma_certify(cfg: _Config, args) -> dict:
    f = cfg.get("f", distribution_from_json)
    if f is None:
        raise ConfigError("f", "a distribution is required")
    region = cfg.get("region", cg.region_from_json)
    if region is None:
        raise ConfigError("region", "an open convex region is required")
    psi = cfg.get("window", function_from_json, Window(1.0, f.dim))
    v = cfg.get("v", weight_from_json, PolyInvWeight(2))
    N_max = cfg.get("N_max", int, 6)
    ladder = _ladder(cfg, args.ladder)
    try:
        out = gamma_membership(f, region, psi, v, ladder, N_max)
    except ValueError as exc:
        raise ConfigError("region", str(exc)) from None
    ok = out["passed"]
    controls = []
    for i, K in enumerate(cfg.items("controls", cg.body_from_json)):
        verdict = membership_ladder(f, K, psi, v, ladder)
        good = verdict.trend == "diverging"
        ok &= good
        controls.append({"body": K.to_json(), "expect": "diverging", "passed": good, **verdict.to_json()})
    out["controls"] = controls
    adj = cfg.sub("adjoint")
    if adj.data:
        eps = adj.get("eps", _positive, 0.5)
        K_index = adj.get("K_index", int, cg.min_exhaustion_index(region))
        g = adj.get("f", distribution_from_json, f)
        grid = adj.get("grid", GridSpec.from_json, DEFAULT_GRID)
        try:
            rep = adjoint_bound_suite(stft(g, psi, grid), region, psi, K_index, eps, default_family(g.dim), seed=args.seed, tol=args.tol)
        except ValueError as exc:
            raise ConfigError("adjoint", str(exc)) from None
        out["adjoint"] = rep.to_json()
        ok &= rep.passed
    out["passed"] = bool(ok)
    return out


def cmd_convolutor_check(cfg: _Config, args) -> dict:
    f = cfg.get("f", distribution_from_json)
    if f is None:
        raise ConfigError("f", "a distribution is required")
    region = cfg.get("region", cg.region_from_json)
    if region is None:
        raise ConfigError("region", "an open convex region is required")
    W = exp_weight_system(region, cfg.get("N_max", int, 6))
    phis = cfg.items("test_functions", function_from_json, [Window(1.0, f.dim)])
    expect = cfg.get("expect", str, "bounded")
    require = cfg.get("require_membership", _flag, True)
    try:
        verdict = convolutor_suite(f, phis, W, _ladder(cfg, args.ladder), require_membership=require)
    except ValueError as exc:
        raise ConfigError("region", str(exc)) from None
    return {"passed": verdict.trend == expect, "expect": expect, **verdict.to_json()}


# -- reports


def _field_json(F: TimeFrequencyField) -> dict:
    return {"grid": F.grid.to_json(), "re": F.values.real.ravel().tolist(), "im": F.values.imag.ravel().tolist(), "meta": F.meta or {}}


def _field_from_json(obj: dict) -> TimeFrequencyField:
    grid = GridSpec.from_json(obj["grid"])
    vals = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    return TimeFrequencyField(grid, vals.reshape(grid.n_x**grid.dim, grid.n_xi**grid.dim), obj.get("meta"))


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1, default=_jsonable, allow_nan=True) + "\n"


def _failures(body: dict) -> list:
    out = []
    for row in body.get("results", []) or body.get("rows", []) or body.get("table", []):
        if isinstance(row, dict) and row.get("passed") is False:
            out.append({k: row[k] for k in ("name", "k", "n", "f", "N", "system", "max_ratio", "reconstruction_error", "isometry_gap") if k in row})
    return out


def cmd_report(args) -> int:
    if not args.inp:
        raise ConfigError("--in", "a report path is required")
    try:
        report = json.loads(Path(args.inp).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("--in", str(exc)) from None
    if not isinstance(report, dict) or report.get("schema") != SCHEMA:
        raise ConfigError("schema", f"expected {SCHEMA!r}")
    summary = {"schema": SCHEMA, "command": "report", "source": report.get("command"), "passed": report.get("passed")}
    if args.csv:
        fld = report.get("result", {}).get("field")
        if fld is None:
            raise ConfigError("result.field", "the report holds no time-frequency field")
        try:
            F = _field_from_json(fld)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("result.field", str(exc)) from None
        with open(args.csv, "w", newline="") as fh:
            summary["csv_rows"] = F.to_csv(fh)
    _emit(summary, args)
    return EXIT_OK


def _emit(report: dict, args) -> None:
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    elif not args.quiet:
        sys.stdout.write(text)


HANDLERS = {
    "check-weights": cmd_check_weights,
    "stft-verify": cmd_stft_verify,
    "lemma-verify": cmd_lemma_verify,
    "gamma-certify": cmd_gamma_certify,
    "convolutor-check": cmd_convolutor_check,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gamma-stft", description="Verify weight systems, STFT identities and seminorm bounds.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", help="write the report's time-frequency field as CSV")
    common.add_argument("--seed", type=int, default=None, help="overrides the config's seed (default 0)")
    common.add_argument("--tol", type=float, default=1e-8, help="relative tolerance on bound ratios")
    common.add_argument("--ladder", type=int, default=None, help="number of ladder windows (>= 3)")
    common.add_argument("--quiet", action="store_true", help="no report on stdout, no failure summary on stderr")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "lemma-verify":
            sp.add_argument("--lemma", type=int, choices=(1, 2), required=True)
        if name == "report":
            sp.add_argument("--in", dest="inp", help="JSON report to read")
    return p


def _load_config(path: str | None) -> _Config:
    if path is None:
        return _Config({})
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("--config", str(exc)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON: {exc}") from None
    return _Config(data)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.command == "report":
            return cmd_report(args)
        cfg = _load_config(args.config)
        if args.seed is None:
            args.seed = cfg.get("seed", int, 0)
        body = HANDLERS[args.command](cfg, args)
    except ConfigError as exc:
        _err(args, {"error": "config", "key": exc.key, "message": str(exc)})
        return EXIT_CONFIG
    except (GuardError, GridTooSmall, QuadratureError) as exc:
        _err(args, {"error": "numerical-guard", "message": str(exc)})
        return EXIT_GUARD
    passed = bool(body.get("passed"))
    report = {"schema": SCHEMA, "command": args.command, "config": cfg.data, "seed": args.seed, "tol": args.tol, "passed": passed, "result": body}
    if args.csv:
        if "field" not in body:
            _err(args, {"error": "config", "key": "--csv", "message": f"{args.command} produces no field"})
            return EXIT_CONFIG
        with open(args.csv, "w", newline="") as fh:
            _field_from_json(body["field"]).to_csv(fh)
    _emit(report, args)
    if not passed:
        _err(args, {"error": "failed", "command": args.command, "failures": _failures(body)})
        return EXIT_FAIL
    return EXIT_OK


def _err(args, payload: dict) -> None:
    if not args.quiet:
        sys.stderr.write(json.dumps(payload, sort_keys=True, default=_jsonable) + "\n")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

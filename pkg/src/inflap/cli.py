"""
Command-line entry point.

Subcommands::

    inflap solve problem.json [--tol] [--init] [--scheme] [--probe-uniqueness] [--out DIR]
    inflap simulate game.json [--n] [--seed] [--out DIR]
    inflap converge domain.json [--eps-schedule] [--h-divisor] [--exact] [--out DIR]
    inflap gallery NAME [--param KEY=VALUE ...] [--out FILE]

The main result is printed to stdout as JSON. With ``--out`` the result,
tables and a manifest are written to files as well. Exit codes: 0 success,
2 invalid input (including infinite width), 3 no converged result,
4 truncation-limited input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import gallery, io
from .calculus import TAU, gradient_estimate_sweep, marching_check
from .errors import DomainError, InputError, PreconditionError, TruncationError
from .euclid import DomainSpec, FunctionSpec, convergence_run
from .game import (EstimationError, GameConfig, GreedyMax, GreedyMin, Scripted, StrategyFault,
                   TowardBoundary, estimate_value)
from .solver import solve, uniqueness_probe

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_TRUNCATED = 0, 2, 3, 4


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> tuple[dict, bytes]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise _Exit(EXIT_INPUT, f"cannot read {path}: {exc.strerror}") from None
    import json
    try:
        return json.loads(raw), raw
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise _Exit(EXIT_INPUT, f"{path}: invalid JSON ({exc})") from None


def _emit(result: dict, out: str | None, files: dict[str, str]) -> None:
    text = io.dumps(result)
    sys.stdout.write(text)
    if out:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        for name, content in files.items():
            (d / name).write_text(content, encoding="utf-8")


# ---------------------------------------------------------------------- #


def _verification(p, u, tau) -> dict:
    g = p.graph
    marched = passed = 0
    for x in np.flatnonzero(p.interior & g.complete):
        for y in g.neighbor_positions(x):
            marched += 1
            passed += marching_check(p, u, int(g.ids[x]), int(g.ids[y]), tau)
    checked, violations = gradient_estimate_sweep(p, u, tau=tau)
    return {
        "marching": {"checked": marched, "passed": int(passed)},
        "gradient_estimate": {"checked": checked, "violations": violations},
    }


def cmd_solve(args) -> int:
    data, raw = _read(args.problem)
    p = io.problem_from_dict(data)
    if p.width is None:
        raise _Exit(EXIT_TRUNCATED, "the width of X cannot be certified on this truncated graph "
                    f"(lower bound {p.partition.width_lower_bound:g})")
    if math.isinf(p.width):
        raise _Exit(EXIT_INPUT, "X has infinite width: some interior vertex cannot reach the "
                    "boundary, and the solver requires finite width")
    out = solve(p, init=args.init, tol=args.tol, max_iters=args.max_iters, scheme=args.scheme)
    result = {"outcome": out.summary(), "width": p.width, "n_vertices": p.graph.n}
    tau = max(TAU, 2 * out.residual)
    result["verification"] = {"residual": out.residual, "tau": tau}
    if out.converged:
        result["verification"].update(_verification(p, out.u, tau))
    if args.probe_uniqueness:
        rep = uniqueness_probe(p, scheme=args.scheme)
        result["uniqueness"] = {"kind": rep.kind, "gap": rep.gap, "witness": rep.witness,
                                "f_sign": rep.f_sign}
    result["field"] = io.field_to_dict(p.graph, out.u)
    files = {
        "outcome.json": io.dumps(result),
        "field.csv": io.field_csv(p.graph, out.u),
        "manifest.json": io.dumps(io.manifest("solve", {"problem": raw}, _argdict(args))),
    }
    _emit(result, args.out, files)
    if not out.converged:
        print(f"error: not converged after {out.iterations} iterations "
              f"(residual {out.residual:.3g})", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


# ---------------------------------------------------------------------- #


def _strategy(spec, cfg: GameConfig, value: np.ndarray | None):
    kind = spec.get("kind")
    if kind in ("greedy_max", "greedy_min"):
        fld = spec.get("field", "value")
        if fld == "value":
            fv = value
        else:
            fv = cfg.graph.field({int(k): float(v) for k, v in fld.items()}, default=0.0)
        return (GreedyMax if kind == "greedy_max" else GreedyMin)(fv)
    if kind == "toward_boundary":
        return TowardBoundary()
    if kind == "scripted":
        return Scripted({int(k): int(v) for k, v in spec["moves"].items()})
    raise InputError(f"unknown strategy kind {kind!r}")


def game_from_dict(d: dict) -> GameConfig:
    for key in ("graph", "X", "start"):
        if key not in d:
            raise InputError(f"game needs '{key}'")
    graph = io.graph_from_dict(d["graph"])
    r = {int(k): float(v) for k, v in d.get("r", {}).items()}
    g = {int(k): float(v) for k, v in d.get("g", {}).items()}
    return GameConfig.build(graph, [int(x) for x in d["X"]], graph.field(r, 0.0), graph.field(g, 0.0),
                            int(d["start"]), int(d.get("max_rounds", 10**6)))


def cmd_simulate(args) -> int:
    data, raw = _read(args.game)
    cfg = game_from_dict(data)
    n = args.n if args.n is not None else int(data.get("n_games", 10**4))
    seed = args.seed if args.seed is not None else int(data.get("seed", 0))
    strat = data.get("strategies", {})
    s1 = strat.get("I", {"kind": "greedy_max"})
    s2 = strat.get("II", {"kind": "greedy_min"})
    value = None
    if any(s.get("kind", "").startswith("greedy") and s.get("field", "value") == "value" for s in (s1, s2)):
        p = cfg.problem()
        p.require_finite_width()
        sol = solve(p, tol=1e-12)
        value = sol.u
    est = estimate_value(cfg, _strategy(s1, cfg, value), _strategy(s2, cfg, value), n, seed)
    result = {"mean": est.mean, "stderr": est.stderr, "capped": est.capped, "n": n, "seed": seed}
    if value is not None:
        result["solver_value"] = float(value[cfg.start_pos])
    if est.capped:
        print(f"warning: {est.capped} of {n} games hit the cap of {cfg.max_rounds} rounds "
              "and were excluded from the mean", file=sys.stderr)
    files = {
        "estimate.json": io.dumps(result),
        "manifest.json": io.dumps(io.manifest("simulate", {"game": raw}, _argdict(args), seed)),
    }
    _emit(result, args.out, files)
    return EXIT_OK


# ---------------------------------------------------------------------- #


def cmd_converge(args) -> int:
    data, raw = _read(args.domain)
    data = dict(data)
    sched = data.pop("eps_schedule", None)
    exact = data.pop("exact", None)
    h_div = float(data.pop("h_divisor", 20))
    r_grid = data.pop("r_grid", None)
    if args.eps_schedule:
        try:
            sched = [float(x) for x in args.eps_schedule.split(",")]
        except ValueError:
            raise InputError("--eps-schedule must be comma-separated numbers") from None
    if sched is None:
        raise InputError("no eps schedule given")
    if args.h_divisor is not None:
        h_div = args.h_divisor
    if args.exact is not None:
        exact = None if args.exact == "none" else json.loads(args.exact)
    if args.r_grid:
        r_grid = [float(x) for x in args.r_grid.split(",")]
    spec = DomainSpec.from_dict(data)
    ex = FunctionSpec.from_dict(exact) if exact is not None else None
    rep = convergence_run(spec, sched, h_rule=lambda e: e / h_div, exact=ex, r_grid=r_grid,
                          rhs_sign=args.rhs_sign, max_samples=args.max_samples)
    result = rep.as_dict()
    cols, rows = rep.table_rows()
    if ex is None:
        drop = cols.index("error")
        cols = cols[:drop] + cols[drop + 1:]
        rows = [r[:drop] + r[drop + 1:] for r in rows]
    files = {
        "report.json": io.dumps(result),
        "report.csv": io.table_csv(cols, rows),
        "manifest.json": io.dumps(io.manifest("converge", {"domain": raw}, _argdict(args))),
    }
    _emit(result, args.out, files)
    failed = [lv for lv in rep.levels if "failure" in lv]
    if failed:
        for lv in failed:
            print(f"error: eps={lv['eps']:g}: {lv['failure']}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


# ---------------------------------------------------------------------- #


def _params(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise InputError(f"--param expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k] = int(v)
        except ValueError:
            try:
                out[k] = float(v)
            except ValueError:
                raise InputError(f"--param {k}: expected a number, got {v!r}") from None
    return out


def gallery_entry(name: str, params: dict) -> dict:
    """Problem and field JSON for a named gallery generator."""
    if name == "sign_change":
        ex = gallery.sign_change_example(**params)
        g = ex.problem.graph
        return {"problem": io.problem_to_dict(ex.problem), "fields": {"u": io.field_to_dict(g, ex.u)},
                "a_range": list(ex.a_range)}
    if name == "doubling":
        ex = gallery.doubling_graph(**({"N": 16} | params))
        g = ex.graph
        return {"problem": io.problem_to_dict(ex.problem),
                "fields": {"u": io.field_to_dict(g, ex.u), "v": io.field_to_dict(g, ex.v)}}
    if name == "comb":
        ex = gallery.comb_graph(**({"C": 2, "N_teeth": 3} | params))
        g = ex.graph
        return {"problem": io.problem_to_dict(ex.problem),
                "fields": {"u": io.field_to_dict(g, ex.u), "v": io.field_to_dict(g, ex.v)},
                "tail_error": ex.tail_error}
    if name == "cca":
        ex = gallery.cca_counterexample(**({"a": 0.3} | params))
        return {"graph": io.graph_to_dict(ex.graph), "fields": {"u": io.field_to_dict(ex.graph, ex.u)},
                "center": ex.center}
    if name == "nonexistence":
        return {"rows": gallery.nonexistence_witness(**({"depth": 16} | params))}
    raise InputError(f"unknown gallery entry {name!r}")


GALLERY_NAMES = ("sign_change", "doubling", "comb", "cca", "nonexistence")


def cmd_gallery(args) -> int:
    params = _params(args.param)
    try:
        entry = gallery_entry(args.name, params)
    except TypeError as exc:
        raise InputError(f"bad parameters for {args.name}: {exc}") from None
    result = {"name": args.name, "params": params, **entry}
    text = io.dumps(result)
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------- #


def _argdict(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="inflap", description="Discrete infinity Laplacian toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a Dirichlet problem on a graph")
    s.add_argument("problem", help="problem JSON (or a gallery file)")
    s.add_argument("--tol", type=float, default=1e-10, help="sup-norm step tolerance")
    s.add_argument("--init", choices=("upper", "lower"), default="upper",
                   help="barrier envelope to start from")
    s.add_argument("--scheme", choices=("jacobi", "gauss_seidel"), default="jacobi")
    s.add_argument("--max-iters", type=int, default=10**6)
    s.add_argument("--probe-uniqueness", action="store_true",
                   help="also solve from the other envelope and report the gap")
    s.add_argument("--out", help="directory for outcome.json, field.csv and manifest.json")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("simulate", help="estimate a tug-of-war value by Monte Carlo")
    s.add_argument("game", help="game JSON")
    s.add_argument("--n", type=int, help="number of games (default: n_games in the file, else 10000)")
    s.add_argument("--seed", type=int, help="coin seed (default: seed in the file, else 0)")
    s.add_argument("--out", help="directory for estimate.json and manifest.json")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("converge", help="run an eps-graph convergence study on a domain")
    s.add_argument("domain", help="domain JSON")
    s.add_argument("--eps-schedule", help="comma-separated decreasing eps values")
    s.add_argument("--h-divisor", type=float, help="sample spacing is eps / divisor (default 20)")
    s.add_argument("--exact", help="function spec as JSON, or 'none'")
    s.add_argument("--r-grid", help="comma-separated interior radii for the modulus tables")
    s.add_argument("--rhs-sign", type=int, choices=(1, -1), default=1,
                   help="sign applied to eps^2 f in the discrete equation")
    s.add_argument("--max-samples", type=int, help="refuse levels with more samples than this")
    s.add_argument("--out", help="directory for report.json, report.csv and manifest.json")
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("gallery", help="emit a gallery example as JSON")
    s.add_argument("name", choices=GALLERY_NAMES)
    s.add_argument("--param", action="append", metavar="KEY=VALUE", help="generator parameter")
    s.add_argument("--out", help="output file")
    s.set_defaults(func=cmd_gallery)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except TruncationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATED
    except (InputError, DomainError, StrategyFault) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EstimationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())

"""``gapdist`` command line interface.

Exit codes: 0 on success, 1 on validation errors (bad flags, invalid
configurations, failed identity checks), 2 on runtime errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import constants, load_config, validate_config
from .enumeration import enumerate_tangencies
from .errors import GapdistError, InvalidConfig
from .geom import MobiusMap
from .groups import HECKE_Q, good_census, normality_check
from .output import (
    COMPARE_SCHEMA,
    COMPONENT_SCHEMA,
    DENSITY_SCHEMA,
    EMPIRICAL_SCHEMA,
    TANGENCY_SCHEMA,
    THEORY_SCHEMA,
    emit_csv,
    read_csv,
    render_svg,
)
from .stats import conformal_pushforward, gap_cdf, ks_distance, min_normalized_gap
from .theory import build_regions, density, limiting_F, pair_component_F, pairs


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# flag parsers ---------------------------------------------------------------


def parse_grid(text: str) -> np.ndarray:
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like a:b:n, got {text!r}")
    if n < 1 or not b >= a:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    return np.linspace(a, b, n)


def _real(text: str) -> float:
    t = text.strip().lower()
    if t in ("pi", "π"):
        return math.pi
    return float(t)


def parse_interval(text: str):
    try:
        a, b = (_real(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"interval must look like a:b, got {text!r}")
    if not b > a:
        raise argparse.ArgumentTypeError(f"empty interval {text!r}")
    return a, b


def parse_matrix(text: str) -> MobiusMap:
    try:
        vals = [complex(x.strip().replace("i", "j")) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"matrix must be four comma separated numbers, got {text!r}")
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("matrix needs exactly four entries a,b,c,d")
    try:
        return MobiusMap(*vals)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


# parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gapdist", description="Gap distribution of tangencies in circle packings.")
    p.add_argument("--version", action="version", version=f"gapdist {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def common(sp, config=True, grid=False, out=True):
        if config:
            sp.add_argument("--config", required=True, help="classical, ap3, ap9 or a JSON file")
        if grid:
            sp.add_argument("--grid", type=parse_grid, default=parse_grid("0:6:600"), help="a:b:n")
        if out:
            sp.add_argument("--out", default="-", help="output path (default stdout)")
        sp.add_argument("--threads", type=positive_int, default=1)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("config", help="show or validate a configuration")
    sp.add_argument("action", choices=("show", "validate", "constants"))
    sp.add_argument("source", help="classical, ap3, ap9 or a JSON file")
    sp.add_argument("--tol", type=positive_float, default=1e-9)

    sp = sub.add_parser("enumerate", help="tangencies with curvature at most T")
    common(sp)
    sp.add_argument("--T", type=positive_float, required=True)
    sp.add_argument("--interval", type=parse_interval, default=None, help="a:b (default one period)")
    sp.add_argument("--node-cap", type=positive_int, default=10**8)

    sp = sub.add_parser("gaps", help="empirical gap distribution")
    common(sp, grid=True)
    sp.add_argument("--T", type=positive_float, required=True)
    sp.add_argument("--interval", type=parse_interval, default=None)

    sp = sub.add_parser("theory", help="limiting gap distribution F(s)")
    common(sp, grid=True)
    sp.add_argument("--tol", type=positive_float, default=1e-6)
    sp.add_argument("--method", choices=("exact", "quadtree", "montecarlo"), default="exact")
    sp.add_argument("--pair", default=None, help="i,j for a single component F^{i,j}")
    sp.add_argument("--dump-regions", default=None, help="write region constraints as JSON")
    sp.add_argument("--dump-s", type=positive_float, default=1.0, help="s used for --dump-regions")

    sp = sub.add_parser("density", help="density F'(s)")
    common(sp, grid=True)
    sp.add_argument("--tol", type=positive_float, default=1e-6)

    sp = sub.add_parser("compare", help="KS distance between empirical and theoretical CDFs")
    sp.add_argument("--empirical", help="CSV with s,F_empirical")
    sp.add_argument("--theory", help="CSV with s,F")
    sp.add_argument("--config", help="compute both sides for this configuration instead")
    sp.add_argument("--T", type=positive_float, default=1e5)
    sp.add_argument("--interval", type=parse_interval, default=None)
    sp.add_argument("--grid", type=parse_grid, default=parse_grid("0:6:600"))
    sp.add_argument("--tol", type=positive_float, default=1e-6)
    sp.add_argument("--out", default=None, help="optional s,F_empirical,F_theory CSV")
    sp.add_argument("--threads", type=positive_int, default=1)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("render", help="SVG picture of the packing")
    common(sp, out=False)
    sp.add_argument("--T", type=positive_float, required=True)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("groups-check", help="verify the matrix identities")
    sp.add_argument("--kind", choices=("all", *HECKE_Q), default="all")
    sp.add_argument("--tol", type=positive_float, default=1e-12)
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("good-census", help="lattice point census (slow, diagnostic)")
    sp.add_argument("--kind", choices=tuple(HECKE_Q), default="classical")
    sp.add_argument("--T", type=positive_float, default=50.0)
    sp.add_argument("--interval", type=parse_interval, default=(0.0, 1.0), help="x range")
    sp.add_argument("--theta", type=parse_interval, default=(0.0, math.pi), help="angle range")
    sp.add_argument("--max-word-len", type=positive_int, default=8)

    sp = sub.add_parser("transfer", help="gap distribution on a conformal image")
    common(sp, grid=True)
    sp.add_argument("--matrix", type=parse_matrix, required=True, help="a,b,c,d (complex allowed, e.g. 1+2i)")
    sp.add_argument("--T", type=positive_float, required=True)
    sp.add_argument("--interval", type=parse_interval, required=True, help="preimage x0:x1 on the real axis")
    sp.add_argument("--margin", type=positive_float, default=0.05)
    sp.add_argument("--tol", type=positive_float, default=1e-6)
    return p


# commands -------------------------------------------------------------------


def _period(cfg, interval):
    return interval if interval is not None else (0.0, cfg.period_t)


def _cmd_config(ns):
    cfg = load_config(ns.source)
    if ns.action == "show":
        print(cfg.to_json())
        return 0
    violations = validate_config(cfg, ns.tol)
    if violations:
        for v in violations:
            print(str(v), file=sys.stderr)
        return 1
    if ns.action == "validate":
        print(f"{cfg.name}: valid (h = {cfg.h}, t = {cfg.period_t:.17g})")
        return 0
    k = constants(cfg)
    print(json.dumps({"D_i": k.D_i, "D": k.D, "c": k.c, "area_gamma": k.area_gamma, "delta": k.delta}, indent=2))
    return 0


def _cmd_enumerate(ns):
    cfg = load_config(ns.config)
    tg = enumerate_tangencies(cfg, ns.T, _period(cfg, ns.interval), node_cap=ns.node_cap, threads=ns.threads)
    emit_csv({"alpha": tg.alpha, "kappa": tg.kappa}, TANGENCY_SCHEMA, ns.out)
    print(f"# {len(tg)} tangencies", file=sys.stderr)
    return 0


def _cmd_gaps(ns):
    cfg = load_config(ns.config)
    interval = _period(cfg, ns.interval)
    tg = enumerate_tangencies(cfg, ns.T, interval, threads=ns.threads)
    E = gap_cdf(tg, interval, ns.grid)
    emit_csv({"s": E.grid, "F_empirical": E.values}, EMPIRICAL_SCHEMA, ns.out)
    print(f"# n = {len(tg)}, min normalized gap = {min_normalized_gap(tg, interval):.9g}", file=sys.stderr)
    return 0


def _cmd_theory(ns):
    cfg = load_config(ns.config)
    if ns.dump_regions:
        dump = {
            "config": cfg.name,
            "s": ns.dump_s,
            "regions": [
                {"pair": [p.i, p.j], "kind": p.kind, "weight": p.weight, **R.to_dict()}
                for p in pairs(cfg)
                for R in build_regions(cfg, p.i, p.j, ns.dump_s)
            ],
        }
        Path(ns.dump_regions).write_text(json.dumps(dump, indent=2), encoding="utf-8")
    if ns.pair:
        try:
            i, j = (int(x) for x in ns.pair.split(","))
        except ValueError:
            raise UsageError(f"--pair must look like i,j, got {ns.pair!r}")
        F = pair_component_F(cfg, i, j, ns.grid, ns.tol, method=ns.method)
        emit_csv({"s": F.grid, "F_ij": F.values}, COMPONENT_SCHEMA, ns.out)
        return 0
    F = limiting_F(cfg, ns.grid, ns.tol, method=ns.method, threads=ns.threads, seed=ns.seed)
    emit_csv({"s": F.grid, "F": F.values}, THEORY_SCHEMA, ns.out)
    return 0


def _cmd_density(ns):
    cfg = load_config(ns.config)
    d = density(cfg, ns.grid, ns.tol, threads=ns.threads)
    emit_csv({"s": d.grid, "density": d.values}, DENSITY_SCHEMA, ns.out)
    return 0


class _Sampled:
    def __init__(self, grid, values):
        self.grid, self.values = np.asarray(grid), np.asarray(values)


def _column(table, names, path):
    for n in names:
        if n in table:
            return table[n]
    raise UsageError(f"{path}: expected a column named one of {names}")


def _cmd_compare(ns):
    if ns.config:
        cfg = load_config(ns.config)
        interval = _period(cfg, ns.interval)
        E = gap_cdf(enumerate_tangencies(cfg, ns.T, interval, threads=ns.threads), interval, ns.grid)
        F = limiting_F(cfg, ns.grid, ns.tol, threads=ns.threads)
    else:
        if not (ns.empirical and ns.theory):
            raise UsageError("compare needs --empirical and --theory, or --config")
        e, t = read_csv(ns.empirical), read_csv(ns.theory)
        E = _Sampled(_column(e, ("s",), ns.empirical), _column(e, ("F_empirical", "F"), ns.empirical))
        F = _Sampled(_column(t, ("s",), ns.theory), _column(t, ("F", "F_theory"), ns.theory))
    ks = ks_distance(E, F)
    print(f"KS = {ks:.17g}")
    if ns.out:
        emit_csv({"s": E.grid, "F_empirical": E.values, "F_theory": np.interp(E.grid, F.grid, F.values)},
                 COMPARE_SCHEMA, ns.out)
    return 0


def _cmd_render(ns):
    cfg = load_config(ns.config)
    render_svg(cfg, ns.T, ns.out)
    return 0


def _cmd_groups(ns):
    kinds = list(HECKE_Q) if ns.kind == "all" else [ns.kind]
    reports = [normality_check(k, ns.tol, strict=False) for k in kinds]
    if ns.json:
        print(json.dumps(
            {r.kind: [{"identity": c.name, "error": c.error, "passed": c.passed} for c in r.checks] for r in reports},
            indent=2,
        ))
    else:
        for r in reports:
            print(r)
    return 0 if all(r.ok for r in reports) else 1


def _cmd_census(ns):
    count, predicted = good_census(ns.kind, ns.T, ns.interval, ns.theta, ns.max_word_len)
    ratio = count / predicted if predicted else float("nan")
    print(f"count = {count}, predicted = {predicted:.6g}, ratio = {ratio:.4f}")
    return 0


def _cmd_transfer(ns):
    cfg = load_config(ns.config)
    tg = conformal_pushforward(cfg, ns.matrix, ns.T, ns.interval, margin=ns.margin)
    E = gap_cdf(tg, tg.interval, ns.grid)
    F = limiting_F(cfg, ns.grid, ns.tol, threads=ns.threads)
    emit_csv({"s": E.grid, "F_empirical": E.values, "F_theory": F.values}, COMPARE_SCHEMA, ns.out)
    print(f"# n = {len(tg)}, arc length = {tg.interval[1] - tg.interval[0]:.9g}, KS = {ks_distance(E, F):.6g}",
          file=sys.stderr)
    return 0


COMMANDS = {
    "config": _cmd_config,
    "enumerate": _cmd_enumerate,
    "gaps": _cmd_gaps,
    "theory": _cmd_theory,
    "density": _cmd_density,
    "compare": _cmd_compare,
    "render": _cmd_render,
    "groups-check": _cmd_groups,
    "good-census": _cmd_census,
    "transfer": _cmd_transfer,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        return COMMANDS[ns.command](ns)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except InvalidConfig as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1
    except (GapdistError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

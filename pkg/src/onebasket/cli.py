"""Command-line front end.

Exit codes: 0 certified or consistent, 2 refuted (or a failed reproduction),
3 undecided, 1 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from ._numbers import fmt, to_fraction
from .dist import from_spec
from .montecarlo import DEFAULT_SEED
from .portfolio import PortfolioSpec, WeightVector, check_onebasket_conditions, global_threshold, load_portfolio
from .repro import REGISTRY, run_case
from .subscale import (
    DEFAULT_HORIZON,
    ScalingFactor,
    Status,
    check_completely_subscalable,
    check_theta_subscalable,
    t_threshold,
)
from .verify import (
    DEFAULT_MAX_X,
    DEFAULT_SAMPLES,
    DEFAULT_TRUNCATE,
    mc_grid,
    verify_dominance_exact,
    verify_dominance_mc,
)

EXIT_OK, EXIT_INPUT, EXIT_REFUTED, EXIT_UNDECIDED = 0, 1, 2, 3

_STATUS_EXIT = {Status.CERTIFIED: EXIT_OK, Status.REFUTED: EXIT_REFUTED, Status.UNDECIDED: EXIT_UNDECIDED}


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def parse_dist(text: str):
    """``kind`` or ``kind:key=value,...`` or a JSON object / file."""
    text = text.strip()
    if text.startswith("{"):
        return from_spec(json.loads(text))
    if text.endswith(".json"):
        with open(text) as fh:
            return from_spec(json.load(fh))
    kind, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise InputError(f"bad parameter {item!r} in --dist (expected key=value)")
        params[key.strip()] = float(val)
    return from_spec({"kind": kind, "params": params})


def parse_theta(text: str) -> ScalingFactor:
    text = text.strip()
    if "/" in text:
        return ScalingFactor.of(text)
    return ScalingFactor.of(float(text))


def parse_weights(text: str) -> WeightVector:
    return WeightVector.of([w.strip() for w in text.split(",")])


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))


def _portfolio(args) -> tuple[PortfolioSpec, dict]:
    if args.spec:
        return load_portfolio(args.spec)
    if not (args.dist and args.theta):
        raise InputError("give a portfolio spec file, or --dist together with --theta w1,w2,...")
    risk = parse_dist(args.dist)
    return PortfolioSpec.iid(risk, parse_weights(args.theta)), {}


# ---------------------------------------------------------------------------
# subcommands


def cmd_subscale(args) -> int:
    if not args.dist:
        raise InputError("--dist is required")
    dist = parse_dist(args.dist)
    horizon = args.horizon
    if args.complete:
        v = check_completely_subscalable(dist, horizon=horizon)
        head = f"{dist}: completely subscalable? {v.status.value}"
    else:
        if not args.theta:
            raise InputError("--theta is required unless --complete is given")
        theta = parse_theta(args.theta)
        v = check_theta_subscalable(dist, theta, horizon)
        head = f"{dist}: {theta}-subscalable? {v.status.value}"
    lines = [head]
    if v.certificate:
        lines.append(f"  certificate: {v.certificate}")
    if v.witness_x is not None:
        lines.append(f"  witness x = {fmt(v.witness_x) if isinstance(v.witness_x, Fraction) else v.witness_x}")
    if v.witness_pair is not None:
        lines.append(f"  h(x1) > h(x2) at (x1, x2) = ({float(v.witness_pair[0])}, {float(v.witness_pair[1])})")
    if v.note:
        lines.append(f"  note: {v.note}")
    payload = {"dist": dist.to_dict(), **v.to_dict()}
    if not args.complete:
        t = t_threshold(dist, theta, horizon)
        lines.append(f"  first failure t = {t}")
        payload["t"] = float(t)
        payload["t_beyond_horizon"] = t.beyond_horizon
    _emit(args, payload, lines)
    return _STATUS_EXIT[v.status]


def cmd_onebasket(args) -> int:
    port, opts = _portfolio(args)
    horizon = args.horizon if args.horizon is not None else float(opts.get("horizon", DEFAULT_HORIZON))
    rep = check_onebasket_conditions(port, horizon)
    t = global_threshold(port, horizon)
    lines = [f"{'risk':>4}  {'theta_mu':>12}  {'status':<10} {'witness':>12}  certificate"]
    for e in rep.entries:
        w = "" if e.verdict.witness_x is None else f"{float(e.verdict.witness_x):.6g}"
        lines.append(
            f"{e.index:>4}  {str(fmt(e.theta_mu)):>12}  {e.verdict.status.value:<10} {w:>12}  {e.verdict.certificate or ''}"
        )
    lines.append(f"all_satisfied = {str(rep.all_satisfied).lower()}")
    f = rep.failing_entry
    if f is not None:
        lines.append(f"failing entry: risk {f.index}, theta_mu = {fmt(f.theta_mu)}, {f.verdict.status.value}")
    lines.append(f"t(theta) = {t}")
    if port.weights.approximate:
        lines.append("note: weights were entered as decimals and are flagged approximate")
    payload = rep.to_dict()
    payload["t"] = float(t)
    payload["t_beyond_horizon"] = t.beyond_horizon
    payload["weights_approximate"] = port.weights.approximate
    _emit(args, payload, lines)
    return _STATUS_EXIT[rep.status]


def _write_curves(path: str, verdict) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "s_concentrated", "s_diversified_lb", "s_diversified_ub", "verdict_cell"])
        for c in verdict.cells:
            w.writerow([repr(v) if isinstance(v, float) else v for v in c.to_row()])


def cmd_verify(args) -> int:
    port, opts = _portfolio(args)
    lattice = port.weights.exact is not None and all(r.lattice_exact for r in port.risks)
    mode = args.mode
    if mode == "auto":
        mode = "exact" if lattice else "mc"
    seed = args.seed if args.seed is not None else int(opts.get("seed", DEFAULT_SEED))
    # options.grid: an explicit list of points, or {"max_x": ...}
    grid = opts.get("grid")
    gmax = args.grid_max
    if isinstance(grid, dict):
        gmax = gmax if gmax is not None else grid.get("max_x")
        grid = None
    if gmax is not None:
        grid = None
    if mode == "exact":
        if not lattice:
            raise InputError("exact mode needs lattice-exact risks and rational weights; use --mode mc")
        T = args.truncate_at if args.truncate_at is not None else int(opts.get("truncate_at", DEFAULT_TRUNCATE))
        if grid is not None:
            grid = [to_fraction(x) for x in grid]
        v = verify_dominance_exact(port, grid=grid, truncate_at=T, max_x=gmax if gmax is not None else DEFAULT_MAX_X)
    else:
        samples = args.samples if args.samples is not None else int(opts.get("samples", DEFAULT_SAMPLES))
        if gmax is not None:
            grid = mc_grid(port, max_x=float(gmax))
        elif grid is not None:
            grid = [float(to_fraction(x)) for x in grid]
        v = verify_dominance_mc(port, grid=grid, samples=samples, seed=seed)
    lines = [f"dominance ({v.mode}): {v.status.value}"]
    lines.append(f"  grid: {len(v.grid)} points in [{float(v.grid[0]):.6g}, {float(v.grid[-1]):.6g}]")
    if v.refutation is not None:
        r = v.refutation
        x = fmt(r.x) if isinstance(r.x, Fraction) else f"{r.x:.6g}"
        g = fmt(r.gap) if isinstance(r.gap, Fraction) else f"{r.gap:.6g}"
        lines.append(f"  witness x = {x}, gap = {g}" + (f", z = {r.z:.2f}" if r.z is not None else ""))
    if v.mode == "exact":
        lines.append(f"  truncate_at = {v.truncate_at}")
    else:
        lines.append(f"  samples = {v.samples}")
    lines.append(f"  seed = {seed:#010x}")
    lines += [f"  note: {n}" for n in v.notes]
    if args.output:
        _write_curves(args.output, v)
        lines.append(f"  curves written to {args.output}")
    payload = v.to_dict()
    payload["seed"] = seed
    _emit(args, payload, lines)
    return v.exit_code


def cmd_reproduce(args) -> int:
    if args.list:
        for c in REGISTRY.values():
            print(f"{c.case_id:<18} {c.description}\n{'':<18} where: {c.location}\n{'':<18} expect: {c.expected}")
        return EXIT_OK
    if args.all:
        ids = list(REGISTRY)
    elif args.case:
        if args.case not in REGISTRY:
            raise InputError(f"unknown case {args.case!r}; registered: {', '.join(REGISTRY)}")
        ids = [args.case]
    else:
        raise InputError("name a case, or use --all / --list")
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    kwargs = {"seed": seed, "nmax": args.nmax}
    if args.samples is not None:
        kwargs["samples"] = args.samples
    results = [run_case(i, **kwargs) for i in ids]
    if args.json:
        print(json.dumps({"seed": seed, "cases": [r.to_dict() for r in results]}, indent=2))
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.case_id}")
            for name, ok, detail in r.checks:
                print(f"    [{'ok' if ok else 'FAIL'}] {name}" + (f"  ({detail})" if detail else ""))
        n_pass = sum(r.passed for r in results)
        print(f"{n_pass}/{len(results)} cases passed (seed {seed:#010x})")
    return EXIT_OK if all(r.passed for r in results) else EXIT_REFUTED


# ---------------------------------------------------------------------------


def _seed(text: str) -> int:
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="onebasket", description="Diversification versus concentration for heavy-tailed risks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("subscale", help="theta-subscalability of a single risk")
    s.add_argument("--dist", help="kind[:key=value,...], JSON object, or JSON file")
    s.add_argument("--theta", help="scaling factor, e.g. 2/3 or 0.75")
    s.add_argument("--horizon", type=float, default=DEFAULT_HORIZON)
    s.add_argument("--complete", action="store_true", help="check every theta at once")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_subscale)

    o = sub.add_parser("onebasket", help="check the one-basket conditions of a portfolio")
    o.add_argument("spec", nargs="?", help="portfolio spec JSON")
    o.add_argument("--dist", help="iid portfolio of this risk (with --theta weights)")
    o.add_argument("--theta", help="comma-separated weights, e.g. 9/10,1/10")
    o.add_argument("--horizon", type=float, default=None)
    o.add_argument("--json", action="store_true")
    o.set_defaults(func=cmd_onebasket)

    v = sub.add_parser("verify", help="check the dominance relation on a grid")
    v.add_argument("spec", nargs="?", help="portfolio spec JSON")
    v.add_argument("--dist")
    v.add_argument("--theta")
    v.add_argument("--mode", choices=("auto", "exact", "mc"), default="auto")
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=_seed)
    v.add_argument("--truncate-at", type=int)
    v.add_argument("--grid-max", type=float)
    v.add_argument("--output", help="write per-point curves as CSV")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reproduce", help="run registered reproduction cases")
    r.add_argument("case", nargs="?")
    r.add_argument("--all", action="store_true")
    r.add_argument("--list", action="store_true")
    r.add_argument("--nmax", type=int, default=5)
    r.add_argument("--samples", type=int)
    r.add_argument("--seed", type=_seed)
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, KeyError, TypeError, json.JSONDecodeError, OSError) as exc:
        print(f"onebasket {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

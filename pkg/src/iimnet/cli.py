"""Command-line front end.

Subcommands: ``simulate`` (cascade a failure and print the step grid),
``harden`` (pick a defence set against an attack), ``export-lp`` (write the
hardening ILP in LP text format), ``gen`` (emit a seeded synthetic network)
and ``experiment`` (heuristic-versus-optimal benchmark matrix).

Exit codes: 0 success, 2 validation error, 3 enumeration budget exceeded,
4 internal integrity failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence

from .cascade import simulate
from .hardening import (
    HardeningMethod,
    harden_case1,
    harden_case3_maxcov,
    harden_exact,
    harden_greedy,
)
from .idrtext import parse_network, serialize_network
from .ilp import build_model, write_lp
from .model import (
    BudgetExceededError,
    CaseClass,
    EntityId,
    IntegrityError,
    ValidationError,
)
from .netgen import GenConfig, generate
from .report import ExperimentSettings, run_experiment, write_outputs
from .vulnerability import DEFAULT_BUDGET, most_vulnerable_exact, most_vulnerable_greedy


def _parse_ids(text: str) -> list[EntityId]:
    tokens = [tok for chunk in text.split(",") for tok in chunk.split()]
    return [EntityId.parse(tok) for tok in tokens]


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for chunk in text.split(",") for tok in chunk.split()]
    except ValueError:
        raise ValidationError(f"expected a comma-separated integer list, got {text!r}")


def _parse_cases(text: str) -> list[CaseClass]:
    out = []
    for tok in (t for chunk in text.split(",") for t in chunk.split()):
        try:
            out.append(CaseClass(tok.upper()))
        except ValueError:
            raise ValidationError(f"unknown case class {tok!r}; expected I, II, III or IV")
    return out


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}")
    return parse_network(text)


def _print_table(header: list[str], rows: list[list[str]]) -> None:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    print("  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip())
    for row in rows:
        print("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())


def cmd_simulate(args) -> int:
    net = _load(args.file)
    attacked = _parse_ids(args.attack)
    hardened = _parse_ids(args.harden)
    trace = simulate(net, attacked, hardened)
    horizon = args.horizon if args.horizon is not None else trace.fixed_point_step
    header = ["entity"] + [f"t{t}" for t in range(horizon + 1)]
    rows = [[str(e)] + [trace.state_at(t)[e].value for t in range(horizon + 1)]
            for e in trace.entities]
    _print_table(header, rows)
    failed = sorted(trace.final_failed)
    print(f"failed {len(failed)}/{len(trace.entities)}:"
          + (" " + " ".join(str(e) for e in failed) if failed else ""))
    print(f"fixed point: t={trace.fixed_point_step}")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(trace.to_csv(horizon=args.horizon))
        print(f"wrote {args.csv}")
    return 0


def cmd_harden(args) -> int:
    net = _load(args.file)
    if args.auto_K is not None:
        if args.vuln_method == "greedy":
            attacked = most_vulnerable_greedy(net, args.auto_K).attacked
        else:
            attacked = most_vulnerable_exact(net, args.auto_K, budget=args.budget).attacked
    else:
        attacked = frozenset(_parse_ids(args.attack))
    method = HardeningMethod(args.method)
    if method is HardeningMethod.EXACT:
        result = harden_exact(net, attacked, args.k, budget=args.budget)
    elif method is HardeningMethod.CASE1:
        result = harden_case1(net, attacked, args.k)
    elif method is HardeningMethod.CASE3_MAXCOV:
        result = harden_case3_maxcov(net, attacked, args.k)
    else:
        result = harden_greedy(net, attacked, args.k)
    payload = {"attacked": [str(e) for e in sorted(attacked)], **result.to_dict()}
    print(json.dumps(payload, indent=2))
    return 0


def cmd_export_lp(args) -> int:
    net = _load(args.file)
    attacked = _parse_ids(args.attack)
    model = build_model(net, attacked, args.k)
    text = write_lp(model, out=args.out)
    if args.out:
        print(f"wrote {args.out}: {len(model.variables)} binaries, "
              f"{len(model.constraints)} constraints, horizon {model.horizon}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen(args) -> int:
    cfg = GenConfig(
        case=CaseClass(args.case.upper()),
        n_a=args.na,
        n_b=args.nb,
        idr_density=args.density,
        max_minterms=args.max_minterms,
        max_minterm_size=args.max_minterm_size,
        seed=args.seed,
    )
    net = generate(cfg)
    text = serialize_network(net)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"wrote {args.out}: case {cfg.case.value}, a={cfg.n_a} b={cfg.n_b}, "
              f"{len(net.idrs)} rules")
    else:
        sys.stdout.write(text)
    return 0


def cmd_experiment(args) -> int:
    seeds = _parse_int_list(args.seed_list) if args.seed_list else list(range(args.seeds))
    if not seeds:
        raise ValidationError("experiment needs at least one seed")
    settings = ExperimentSettings(
        cases=_parse_cases(args.cases),
        sizes=_parse_int_list(args.sizes),
        K=args.K,
        k_list=_parse_int_list(args.k_list),
        seeds=seeds,
        idr_density=args.density,
        max_minterms=args.max_minterms,
        max_minterm_size=args.max_minterm_size,
        vuln_method=args.vuln_method,
        budget=args.budget,
    )
    result = run_experiment(settings)
    paths = write_outputs(result, args.out, figures=not args.no_figures)
    print(f"rows: {result.ok_rows} ok, {result.failed_rows} failed")
    gap = result.mean_gap
    if gap is not None:
        print(f"mean gap ratio: {gap:.6f}")
    for label in ("payload", "timings", "plotdata"):
        print(f"wrote {paths[label]}")
    for fig in paths["figures"]:
        print(f"wrote {fig}")
    return 1 if result.ok_rows == 0 and result.failed_rows > 0 else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iimnet",
        description="Cascade simulation, vulnerability analysis and entity "
                    "hardening for two-layer interdependent networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a cascade and print the step grid")
    p.add_argument("file", help="network file (.idr)")
    p.add_argument("--attack", default="", help="comma-separated entity ids to fail at t=0")
    p.add_argument("--harden", default="", help="comma-separated entity ids made immune")
    p.add_argument("--csv", help="also write the step grid to this CSV file")
    p.add_argument("--horizon", type=int, help="pad or clip the grid to steps 0..N")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("harden", help="choose k entities to defend against an attack")
    p.add_argument("file", help="network file (.idr)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--attack", help="comma-separated entity ids under attack")
    group.add_argument("--auto-K", dest="auto_K", type=int, metavar="K",
                       help="attack the K most vulnerable entities instead")
    p.add_argument("--k", type=int, required=True, help="defence budget")
    p.add_argument("--method", default="greedy",
                   choices=[m.value for m in HardeningMethod])
    p.add_argument("--vuln-method", default="exact", choices=["exact", "greedy"],
                   help="search used by --auto-K")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help="subset enumeration cap for exact searches")
    p.set_defaults(func=cmd_harden)

    p = sub.add_parser("export-lp", help="write the hardening ILP in LP text format")
    p.add_argument("file", help="network file (.idr)")
    p.add_argument("--attack", required=True, help="comma-separated entity ids under attack")
    p.add_argument("--k", type=int, required=True, help="defence budget")
    p.add_argument("--out", help="output path (default: print to stdout)")
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("gen", help="generate a seeded synthetic network")
    p.add_argument("--case", required=True, choices=["I", "II", "III", "IV"])
    p.add_argument("--na", type=int, required=True, help="entity count in layer a")
    p.add_argument("--nb", type=int, required=True, help="entity count in layer b")
    p.add_argument("--density", type=float, default=1.0,
                   help="probability an entity gets a dependency rule")
    p.add_argument("--max-minterms", type=int, default=3)
    p.add_argument("--max-minterm-size", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default: print to stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("experiment",
                       help="benchmark hardening methods over seeded networks")
    p.add_argument("--cases", default="IV", help="comma-separated case classes")
    p.add_argument("--sizes", default="12", help="comma-separated total entity counts")
    p.add_argument("--K", type=int, default=4, help="attack size")
    p.add_argument("--k-list", dest="k_list", default="1,2,3",
                   help="comma-separated defence budgets")
    p.add_argument("--seeds", type=int, default=20, help="use seeds 0..N-1")
    p.add_argument("--seed-list", dest="seed_list",
                   help="explicit comma-separated seed list (overrides --seeds)")
    p.add_argument("--density", type=float, default=0.8)
    p.add_argument("--max-minterms", type=int, default=3)
    p.add_argument("--max-minterm-size", type=int, default=3)
    p.add_argument("--vuln-method", default="exact", choices=["exact", "greedy"])
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--no-figures", action="store_true",
                   help="skip rendering comparison figures")
    p.add_argument("--out", required=True, help="payload CSV path")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except IntegrityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())

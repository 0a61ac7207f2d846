"""Command-line entry point: ``sqkd <subcommand> ...``.

Exit codes: 0 success, 1 tool/input error, 2 the analysis says abort.
"""
from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from pathlib import Path

from . import _kernels, sim, sweep
from .attack import AttackSpec, ChannelStatistics, exact_statistics, validate
from .bound import key_rate
from .depol import DepolScenario, closed_form_statistics, dilation
from .errors import SQKDError, ValidationError

EXIT_OK, EXIT_ERROR, EXIT_ABORT = 0, 1, 2


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _read_json(path, what):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {what} file {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed {what} JSON in {path}: {exc}") from None


@contextmanager
def _out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit(obj, path):
    with _out(path) as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _add_source(p, stats=True):
    p.add_argument("--q", type=float, help="depolarization parameter of the return channel")
    p.add_argument("--b", type=float, help="forward-channel bias (with --q)")
    p.add_argument("--attack", help="attack JSON file")
    if stats:
        p.add_argument("--stats", help="channel statistics JSON file")


def _scenario_or_attack(args, parser):
    sources = [args.q is not None or args.b is not None, args.attack is not None,
               getattr(args, "stats", None) is not None]
    if sum(sources) != 1:
        parser.error("give exactly one input source: --q/--b, --attack, or --stats")
    if sources[0] and args.q is None:
        parser.error("--b requires --q")
    if sources[1]:
        return AttackSpec.from_dict(_read_json(args.attack, "attack"))
    if sources[0]:
        return DepolScenario(args.q, args.b or 0.0)
    return ChannelStatistics.from_dict(_read_json(args.stats, "statistics"))


def cmd_keyrate(args, parser):
    src = _scenario_or_attack(args, parser)
    if isinstance(src, AttackSpec):
        stats = exact_statistics(src)
    elif isinstance(src, DepolScenario):
        stats = closed_form_statistics(src)
    else:
        stats = src
    rep = key_rate(stats)
    _emit({"stats": stats.to_dict(), "report": rep.to_dict()}, args.output)
    return EXIT_ABORT if rep.aborted else EXIT_OK


def cmd_simulate(args, parser):
    src = _scenario_or_attack(args, parser)
    attack = src if isinstance(src, AttackSpec) else dilation(src)
    cfg = sim.SimulationConfig(attack, args.iterations, args.seed, args.balance_mode, args.shards)
    tally = sim.run(cfg)
    est = sim.estimate(tally)
    report = None
    if not est.partial:
        report = key_rate(est.stats).to_dict()
    _emit({
        "seed": args.seed,
        "generator": tally.generator,
        "backend": _kernels.BACKEND,
        "shards": args.shards,
        "tally": tally.to_dict(),
        "errors": tally.error_counts(),
        "estimate": est.to_dict(),
        "report": report,
    }, args.output)
    if report is None or report["aborted"]:
        return EXIT_ABORT
    return EXIT_OK


def cmd_sweep(args, parser):
    rows = sweep.sweep_keyrate(args.b_list, args.q_min, args.q_max, args.q_step)
    with _out(args.output) as fh:
        sweep.write_sweep_csv(rows, fh)
    return EXIT_OK


def cmd_threshold(args, parser):
    if args.b_list is not None:
        bs = args.b_list
    elif None not in (args.b_min, args.b_max, args.b_step):
        bs = sweep.grid(args.b_min, args.b_max, args.b_step)
    else:
        parser.error("give --b-list or all of --b-min/--b-max/--b-step")
    with _out(args.output) as fh:
        sweep.write_threshold_csv(sweep.thresholds(bs), fh)
    return EXIT_OK


def cmd_validate(args, parser):
    attack = AttackSpec.from_dict(_read_json(args.attack, "attack"))
    rep = validate(attack)
    _emit(rep.to_dict(), args.output)
    return EXIT_OK if rep.passed else EXIT_ERROR


def cmd_dilate(args, parser):
    attack = dilation(DepolScenario(args.q, args.b))
    _emit(attack.to_dict(), args.output)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="sqkd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keyrate", help="key-rate bound from a scenario, statistics, or attack")
    _add_source(p)
    p.set_defaults(func=cmd_keyrate)

    p = sub.add_parser("simulate", help="Monte-Carlo run with estimated statistics and bound")
    _add_source(p, stats=False)
    p.add_argument("--iterations", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--balance-mode", choices=sim.BALANCE_MODES, default="empirical")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="CSV of the bound over a (b, q) grid")
    p.add_argument("--b-list", type=_floats, required=True)
    p.add_argument("--q-min", type=float, default=0.0)
    p.add_argument("--q-max", type=float, default=0.15)
    p.add_argument("--q-step", type=float, default=0.001)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("threshold", help="CSV of the noise threshold tau_Q(b)")
    p.add_argument("--b-list", type=_floats)
    p.add_argument("--b-min", type=float)
    p.add_argument("--b-max", type=float)
    p.add_argument("--b-step", type=float)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("validate", help="check an attack file's unitarity constraints")
    p.add_argument("--attack", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dilate", help="write the depolarizing channel as an attack file")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--b", type=float, default=0.0)
    p.set_defaults(func=cmd_dilate)

    for sp in sub.choices.values():
        sp.add_argument("-o", "--output", help="output path (default: stdout)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except SQKDError as exc:
        print(f"sqkd {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command line entry point: one subcommand per experiment."""
from __future__ import annotations

import argparse
import logging
import sys

from irsperf.experiments import REGISTRY, ExperimentSpec, Sweep, run_experiment, write_outputs
from irsperf.scenario import ScenarioConfig, parse_override

log = logging.getLogger("irsperf")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base seed for Monte Carlo trials")
    common.add_argument("--trials", type=int, default=None,
                        help="Monte Carlo trials per point (experiment default if omitted)")
    common.add_argument("--config", help="flat key: value scenario file")
    common.add_argument("--out", default="results", help="output directory (default: results)")
    common.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="override one scenario field; repeatable")
    common.add_argument("--sweep", metavar="VAR=V1,V2,...",
                        help="replace the default sweep grid (N for figures; any field for custom)")
    common.add_argument("--workers", type=int, default=1,
                        help="processes for Monte Carlo trials (results do not depend on it)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="irsperf",
        description="Reproduce the IRS asymptotic-performance figures and tables.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="EXPERIMENT")
    for name in REGISTRY:
        sub.add_parser(name, parents=[common], help=f"run {name}")
    sub.add_parser("all", parents=[common], help="run every registered experiment except custom")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        base = ScenarioConfig.from_file(args.config) if args.config else ScenarioConfig()
        overrides = dict(parse_override(o) for o in args.override)
        sweep = Sweep.parse(args.sweep) if args.sweep else None
        names = [n for n in REGISTRY if n != "custom"] if args.experiment == "all" else [args.experiment]
        specs = [ExperimentSpec(n, overrides, sweep, args.trials, args.seed) for n in names]
        for spec in specs:
            log.info("running %s", spec.name)
            tables = run_experiment(spec, base, workers=args.workers)
            for path in write_outputs(tables, args.out):
                print(path)
    except (ValueError, OSError) as exc:
        print(f"irsperf: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

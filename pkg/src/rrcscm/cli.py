"""Command-line entry point: ``rrcscm bench ...`` and ``rrcscm data ...``."""

import argparse
import logging
import sys
from dataclasses import replace

from .campaign import EXIT_CONFIG, EXIT_OK, CampaignConfig, ConfigError, read_results, run_campaign
from .core import summarize
from .datasets import bundled_names, resolve


def _bench_run(args):
    try:
        config = CampaignConfig.load(args.config)
        overrides = {}
        if args.output:
            overrides["output"] = args.output
        if args.workers:
            overrides["workers"] = args.workers
        if overrides:
            config = replace(config, **overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    result = run_campaign(config, progress=lambda name: print(f"done {name}", flush=True))
    print(f"{len(result.records)} records written to {config.output}")
    for failure in result.failures:
        print(f"failed {failure['dataset']}: {failure['error']}", file=sys.stderr)
    return result.exit_code


def _bench_summarize(args):
    from .report import summary_text
    print(summary_text(read_results(args.results)), end="")
    return EXIT_OK


def _bench_compare(args):
    from .report import write_comparison
    print(write_comparison(read_results(args.results), args.results, args.alpha), end="")
    return EXIT_OK


def _bench_radar(args):
    from .report import write_radars
    for path in write_radars(read_results(args.results), args.results):
        print(path)
    return EXIT_OK


def _data_info(args):
    print(summarize(resolve(args.path)))
    return EXIT_OK


def _data_list(args):
    for name in bundled_names():
        print(f"{name:12s} {summarize(resolve(name))}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="rrcscm", description="RRC/SCM benchmark tools")
    parser.add_argument("-v", "--verbose", action="store_true")
    groups = parser.add_subparsers(dest="group", required=True)

    bench = groups.add_parser("bench", help="run and analyse benchmark campaigns")
    sub = bench.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a campaign from a config file")
    p.add_argument("config")
    p.add_argument("--output", help="override the output directory")
    p.add_argument("--workers", type=int, help="override the worker count")
    p.set_defaults(func=_bench_run)
    p = sub.add_parser("summarize", help="mean losses per dataset and variant")
    p.add_argument("results")
    p.set_defaults(func=_bench_summarize)
    p = sub.add_parser("compare", help="average ranks, Friedman and corrected Wilcoxon tests")
    p.add_argument("results")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=_bench_compare)
    p = sub.add_parser("radar", help="radar chart of average ranks per base classifier")
    p.add_argument("results")
    p.set_defaults(func=_bench_radar)

    data = groups.add_parser("data", help="inspect datasets")
    sub = data.add_subparsers(dest="command", required=True)
    p = sub.add_parser("info", help="instances, dimensionality, classes and imbalance ratio")
    p.add_argument("path", help="ARFF/CSV file or bundled dataset name")
    p.set_defaults(func=_data_info)
    p = sub.add_parser("list", help="bundled datasets")
    p.set_defaults(func=_data_list)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface.

Subcommands
-----------
run <config>        execute the full analysis and write a report
simulate <config>   generate the synthetic dataset from the config
summarize <report>  print the text tables for a finished run

Exit status: 0 success, 1 configuration or input problem, 2 estimation
failed to converge, 3 internal error. The output directory resolves, in
order, from ``--out``, the ``CROSSVOL_OUT_DIR`` environment variable and
the ``out_dir`` config key.
"""

from __future__ import annotations

import argparse
import sys
import traceback

from . import __version__, pipeline
from .config import parse_config
from .exceptions import CrossvolError
from .pipeline import EXIT_INTERNAL, exit_code_for


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossvol",
        description="paired-market volatility spillover analysis",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the full analysis for a config")
    p_run.add_argument("config", help="path to the key-value config file")
    p_run.add_argument("--out", help="output directory override")

    p_sim = sub.add_parser("simulate", help="generate the synthetic dataset")
    p_sim.add_argument("config", help="config file with a simulate section")
    p_sim.add_argument("--out", help="data directory override")

    p_sum = sub.add_parser("summarize", help="print tables for a run report")
    p_sum.add_argument("report", help="path to report.json from a run")
    return parser


def _cmd_run(args) -> int:
    cfg = parse_config(args.config)
    out = pipeline.resolve_out_dir(cfg, args.out)
    report, code = pipeline.run(cfg, out_dir=args.out)
    for name in sorted(report["pairs"]):
        rec = report["pairs"][name]
        if "error" in rec:
            err = rec["error"]
            print(f"pair {name}: FAILED {err['type']}: {err['message']}", file=sys.stderr)
        else:
            ranks = {s: r["johansen"]["rank"] for s, r in rec["subperiods"].items()}
            kinds = {s: r["model_kind"] for s, r in rec["subperiods"].items()}
            detail = ", ".join(f"{s} rank {ranks[s]} {kinds[s]}" for s in sorted(ranks))
            print(f"pair {name}: ok ({detail})")
    print(f"report: {out}/report.json")
    return code


def _cmd_simulate(args) -> int:
    cfg = parse_config(args.config)
    info = pipeline.simulate(cfg, args.out)
    print(
        f"wrote {len(info['files'])} files to {info['out_dir']} "
        f"({info['n_contracts']} contract series, {info['observations']} trading days)"
    )
    print(f"dates {info['first_date']} .. {info['last_date']}, boundary {info['boundary']}")
    return 0


def _cmd_summarize(args) -> int:
    sys.stdout.write(pipeline.summarize(args.report))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "simulate": _cmd_simulate, "summarize": _cmd_summarize}
    try:
        return handler[args.command](args)
    except CrossvolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

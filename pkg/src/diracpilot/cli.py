"""Command-line front end.

    diracpilot run CONFIG [--output-dir PATH] [--seed N] [--workers N]
    diracpilot list [FILTER]

Exit codes: 0 scenario ran and its check passed; 2 scenario ran but the
physics/statistics check failed; 1 configuration or runtime error.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .config import ConfigError, load_config
from .reporting import write_manifest
from .scenarios import list_scenarios, run_scenario


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="diracpilot",
        description="Scenario runner for the covariant pilot-wave Dirac simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--output-dir", type=Path, default=None)
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--workers", type=int, default=1, help="concurrency cap")

    p_list = sub.add_parser("list", help="list registered scenarios")
    p_list.add_argument("filter", nargs="?", default="")

    args = parser.parse_args(argv)

    if args.command == "list":
        for name, desc in list_scenarios(args.filter):
            print(f"{name:32s} {desc}")
        return 0

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        out_dir = args.output_dir or Path(cfg.output_dir or f"out-{cfg.scenario}")
        t0 = time.perf_counter()
        passed, report, files = run_scenario(cfg, out_dir, workers=max(1, args.workers))
        wall = time.perf_counter() - t0
        write_manifest(
            Path(out_dir) / "manifest.json",
            args.config, cfg.scenario, cfg.seed, passed, files, wall,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numeric/runtime failures
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1
    status = "PASS" if passed else "FAIL"
    print(f"{cfg.scenario}: {status} (outputs in {out_dir})")
    return 0 if passed else 2


if __name__ == "__main__":
    sys.exit(main())

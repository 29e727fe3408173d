"""Command-line entry point: configs in, CSV/JSON artifacts and PASS/FAIL out.

Exit status: 0 all assertions pass, 1 a numerical assertion failed,
2 usage/config error (malformed JSON, unknown command, bad flags).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .errors import ConfigError, SerieslabError
from .experiments import COMMANDS, ExperimentConfig, run_experiment


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="serieslab",
        description="numerical laboratory for graded linear series")
    p.add_argument("command", nargs="?", choices=COMMANDS,
                   help="experiment to run (may come from --config instead)")
    p.add_argument("--config", help="path to a JSON experiment config")
    p.add_argument("--out", default=".", help="artifact output directory")
    p.add_argument("--seed", type=int, default=None, help="RNG seed override")
    p.add_argument("--kmax", type=int, default=None, help="max degree override")
    p.add_argument("--quiet", action="store_true", help="suppress progress text")
    p.add_argument("--deterministic-names", action="store_true",
                   help="name artifacts <command>.<ext> instead of timestamped")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config is not None:
            with open(args.config) as fh:
                cfg = ExperimentConfig.from_json(fh.read())
            if args.command is not None and args.command != cfg.command:
                raise ConfigError("command flag conflicts with config")
        elif args.command is not None:
            cfg = ExperimentConfig(args.command)
        else:
            raise ConfigError("either a command or --config is required")
        if args.seed is not None:
            cfg.seed = args.seed
        if args.kmax is not None:
            if args.kmax <= 0:
                raise ConfigError("kmax must be positive")
            cfg.kmax = args.kmax
    except (ConfigError, OSError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2

    t0 = time.perf_counter()
    try:
        summary, artifacts, checks = run_experiment(cfg)
    except ConfigError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except SerieslabError as e:
        print("numerical failure: %s" % e, file=sys.stderr)
        return 1

    os.makedirs(args.out, exist_ok=True)
    stamp = "" if args.deterministic_names else "_%d" % int(time.time())
    json_path = os.path.join(args.out, "%s%s.json" % (cfg.command, stamp))
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths = [json_path]
    for name, text in artifacts.items():
        base, ext = os.path.splitext(name)
        path = os.path.join(args.out, "%s_%s%s%s" % (cfg.command, base, stamp, ext))
        with open(path, "w") as fh:
            fh.write(text)
        paths.append(path)

    for name, passed, detail in checks:
        print("%s %s: %s" % ("PASS" if passed else "FAIL", name, detail))
    if not args.quiet:
        print("artifacts: %s" % ", ".join(paths))
        print("elapsed: %.2f s" % (time.perf_counter() - t0))
    return 0 if all(p for _, p, _ in checks) else 1


if __name__ == "__main__":
    sys.exit(main())

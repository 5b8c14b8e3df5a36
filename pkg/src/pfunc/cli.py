"""Command line: ``pfunc run``, ``pfunc list``, ``pfunc dump-field``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, PFuncError
from .jobs import dump_field, run_config
from .registry import list_registry


def _parser():
    p = argparse.ArgumentParser(prog="pfunc", description="P-function verification laboratory")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run every job of a config file")
    r.add_argument("config", type=Path)
    r.add_argument("--out", type=Path, default=None, help="directory for reports (default: next to config)")
    sub.add_parser("list", help="list registered equations, P-functions, fixtures and checks")
    d = sub.add_parser("dump-field", help="write the field behind one check as CSV")
    d.add_argument("job")
    d.add_argument("check")
    d.add_argument("--config", type=Path, required=True)
    d.add_argument("--out", type=Path, required=True)
    return p


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path=str(path)) from None


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "list":
            sys.stdout.write(list_registry())
            return 0
        if args.command == "run":
            return run_config(_read(args.config), args.config.parent, args.out)
        path = dump_field(_read(args.config), args.job, args.check, args.out)
        print(path)
        return 0
    except ConfigError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return 2
    except PFuncError as exc:
        print(json.dumps(exc.to_dict(), default=str), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

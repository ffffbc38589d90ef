"""Command-line entry point: ``repeaterlab run|validate|presets``.

Exit codes: 0 ok, 1 I/O failure, 2 schema error (with the field path), 3 infeasible physics.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from .errors import RepeaterError
from .presets import PRESETS
from .runner import run_scenario, write_tables
from .scenario import ConfigError, load_scenario, validate_physics

EXIT_OK, EXIT_IO, EXIT_SCHEMA, EXIT_PHYSICS = 0, 1, 2, 3


def bundled_scenarios() -> list[str]:
    root = resources.files("repeaterlab") / "scenarios"
    return sorted(p.name[: -len(".scenario")] for p in root.iterdir() if p.name.endswith(".scenario"))


def resolve_path(name: str) -> Path:
    """A filesystem path, or the name of a bundled scenario."""
    path = Path(name)
    if path.exists():
        return path
    bundled = resources.files("repeaterlab") / "scenarios" / f"{path.stem}.scenario"
    if bundled.is_file():
        return Path(str(bundled))
    return path


def _check(path: Path):
    sc = load_scenario(path)
    notes = []
    for _, vals in sc.points():
        _, msgs = validate_physics(vals)
        notes += [m for m in msgs if m not in notes]
    return sc, notes


def cmd_validate(args) -> int:
    sc, notes = _check(resolve_path(args.file))
    for msg in notes:
        print(f"warning: {msg}", file=sys.stderr)
    n = len(sc.points())
    print(f"{sc.name}: ok ({n} point{'s' if n != 1 else ''}; outputs {', '.join(sc.outputs)})")
    return EXIT_OK


def cmd_run(args) -> int:
    sc, notes = _check(resolve_path(args.file))
    for msg in notes:
        print(f"warning: {msg}", file=sys.stderr)
    tables = run_scenario(sc)
    for path in write_tables(sc, tables, Path(args.out), args.format):
        print(path)
    return EXIT_OK


def cmd_presets(args) -> int:
    for name in sorted(PRESETS):
        preset = PRESETS[name]
        print(f"{name}: {preset['source']}")
        for section, body in preset.items():
            if section == "source":
                continue
            vals = ", ".join(f"{k}={v}" for k, v in body.items())
            print(f"    [{section}] {vals}")
    if args.verbose:
        print("bundled scenarios: " + ", ".join(bundled_scenarios()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repeaterlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    run = sub.add_parser("run", help="evaluate a scenario and write result tables")
    run.add_argument("file", help="scenario file or bundled scenario name")
    run.add_argument("--out", default="results", help="output directory (default: results)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", help="check schema and physics without running")
    val.add_argument("file")
    val.set_defaults(func=cmd_validate)

    pre = sub.add_parser("presets", help="list named parameter presets")
    pre.add_argument("-v", "--verbose", action="store_true", help="also list bundled scenarios")
    pre.set_defaults(func=cmd_presets)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except RepeaterError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``biovalent <factors|footprint|statement|quadrant|validate|run>``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import DEMO_CONFIG, load_config
from .errors import BiovalentError
from .footprint import format_bde
from .pipeline import run_pipeline, validate
from .statement import render_text

log = logging.getLogger("biovalent")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=str(DEMO_CONFIG),
                        help="TOML run configuration (default: bundled demo fixture)")
    common.add_argument("--scenario", default=None, help="offset scenario to report (default: all)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="biovalent", description="Biodiversity and carbon footprint accounting")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("factors", parents=[common], help="derive (or import) and export the impact factor set")
    sub.add_parser("footprint", parents=[common], help="footprints per category and statement line")
    sub.add_parser("statement", parents=[common], help="financial-environmental impact statement")
    sub.add_parser("quadrant", parents=[common], help="quadrant-of-opportunities SVG")
    sub.add_parser("validate", parents=[common], help="check every input without writing outputs")
    sub.add_parser("run", parents=[common], help="full pipeline, all outputs")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.command == "validate":
            findings = validate(cfg)
            for f in findings:
                print(f"FAIL {f}")
            print("inputs valid" if not findings else f"{len(findings)} problem(s)")
            return 1 if findings else 0

        plan = {
            "factors": ("factors", ("factors",)),
            "footprint": ("footprint", ("footprint",)),
            "statement": ("statement", ("statement",)),
            "quadrant": ("quadrant", ("quadrant",)),
            "run": ("quadrant", None),
        }
        until, write = plan[args.command]
        res = run_pipeline(cfg, args.out, args.fmt, args.scenario, until=until, write=write)
        if args.command == "footprint":
            for g in res.categories:
                print(f"{g.category:<32}{g.consumption_eur:>16,.0f} EUR  {format_bde(g.bde.value):>14}"
                      f"  {g.co2e_kg / 1000:>10,.1f} tCO2e")
        elif args.command == "statement":
            print(render_text(res.statement), end="")
        elif args.command == "run":
            print(f"total {format_bde(res.total_bde)}, {res.total_co2e_kg / 1000:,.1f} tCO2e")
        for path in res.outputs:
            print(f"wrote {path}")
        return 0
    except (BiovalentError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

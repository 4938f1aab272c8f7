"""Script entry point: render one figure from a JSON FigureSpec file."""

from __future__ import annotations

import argparse
import json
import sys

from .render import render
from .spec import SchemaError, load_spec


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rerfigures", description=__doc__.strip())
    parser.add_argument("spec", help="path to a JSON FigureSpec document")
    parser.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)
    try:
        spec = load_spec(args.spec)
    except (OSError, json.JSONDecodeError, SchemaError) as exc:
        print(f"error: invalid spec: {exc}", file=sys.stderr)
        return 2
    try:
        out = render(spec)
    except SchemaError as exc:
        print(f"error: invalid input data: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failure contract
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

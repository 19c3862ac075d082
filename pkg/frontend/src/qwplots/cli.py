"""Render command: one figure per invocation from qwsearch artifacts."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwplots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from artifact files")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--in", dest="inputs", required=True, nargs="+",
                   help="input artifact paths (CSV, optionally a summary JSON)")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--style", nargs="*", default=[],
                   help="key=value style overrides (dpi, title, cmap, color, figsize)")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    style = {}
    for item in args.style:
        key, sep, value = item.partition("=")
        if not sep:
            print(f"error: style entry {item!r} is not key=value", file=sys.stderr)
            return 1
        style[key] = value
    try:
        spec = FigureSpec(kind=args.kind, inputs=tuple(args.inputs),
                          out_path=args.out, style=style)
        meta = render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {meta['out_path']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

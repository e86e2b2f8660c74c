"""render-esd: eigenvalue histogram with a semicircle overlay.

Exit codes: 0 success, 2 bad input (schema, radius, arguments), 4 I/O.
"""

from __future__ import annotations

import argparse
import sys

from .render import PlotSpec, SchemaError, render_esd


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="render-esd", description=__doc__.split("\n")[0])
    ap.add_argument("--histogram", required=True, help="histogram CSV (bin_lo,bin_hi,density,count)")
    ap.add_argument("--radius", required=True, type=float, help="semicircle radius for the overlay")
    ap.add_argument("--title", required=True, help="figure title")
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--format", choices=("svg", "png"), default="svg")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = PlotSpec(
            histogram=args.histogram,
            radius=args.radius,
            title=args.title,
            out=args.out,
            format=args.format,
        )
        result = render_esd(spec)
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    print(f"wrote {result.out} (curve peak {result.peak:.6g}, integral {result.curve_integral:.4f})")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

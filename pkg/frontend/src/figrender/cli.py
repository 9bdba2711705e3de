"""``render --input FILE --figure {hoffman_scaling|trajectory} --output FILE.png``"""

import argparse
import sys

from .render import FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="render",
                                     description="Render geomopt CSVs to figures")
    parser.add_argument("--input", required=True, help="experiment CSV file")
    parser.add_argument("--figure", required=True,
                        choices=("hoffman_scaling", "trajectory"))
    parser.add_argument("--output", required=True, help="image file to write")
    parser.add_argument("--no-log-axes", action="store_true",
                        help="linear axes for the scaling figure")
    args = parser.parse_args(argv)
    spec = FigureSpec(args.input, args.figure, args.output,
                      log_axes=not args.no_log_axes)
    try:
        result = render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.output} ({len(result.series)} series)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

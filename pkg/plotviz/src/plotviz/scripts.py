"""Entry points: one thin script per plot kind.

Shared flags: --input (repeatable), --output, --case, --overlay-params
(JSON object with breakpoints/l_t/l_x/nu for the analytic enstrophy
overlay), --label (repeatable, one per input).
Exit codes: 0 on success, 1 on empty input, 2 on schema/argument errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .jobs import EmptyInput, PlotJob, SchemaError
from .plots import plot


def _parser(kind: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=f"plot-{kind}",
                                description=f"render a {kind} figure from torusflow CSV output")
    p.add_argument("--input", action="append", required=True,
                   help="input CSV (repeat for multiple curves)")
    p.add_argument("--output", required=True, help="image file to write")
    p.add_argument("--case", default=None,
                   help="case name for the analytic overlay (example2, "
                        "example3-freqA, example3-freqB)")
    p.add_argument("--overlay-params", default=None,
                   help='JSON overlay spec, e.g. \'{"breakpoints":[0,20,40],'
                        '"l_t":[1],"l_x":1,"nu":0.5}\'')
    p.add_argument("--label", action="append", default=[],
                   help="legend label, one per input")
    return p


def _run(kind: str, argv) -> int:
    args = _parser(kind).parse_args(argv)
    try:
        overlay = json.loads(args.overlay_params) if args.overlay_params else None
    except json.JSONDecodeError as e:
        print(f"error: bad --overlay-params: {e}", file=sys.stderr)
        return 2
    job = PlotJob(inputs=args.input, kind=kind, output=args.output,
                  case=args.case, overlay_params=overlay, labels=args.label)
    try:
        plot(job)
    except EmptyInput as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (SchemaError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"wrote {args.output}")
    return 0


def main_convergence(argv=None) -> int:
    return _run("convergence", argv)


def main_enstrophy(argv=None) -> int:
    return _run("enstrophy", argv)


def main_stepsize(argv=None) -> int:
    return _run("stepsize", argv)


def main_error(argv=None) -> int:
    return _run("error", argv)


if __name__ == "__main__":
    sys.exit(main_enstrophy())

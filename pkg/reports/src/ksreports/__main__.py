"""Batch entry point: python -m ksreports <spec.json>

The spec file mirrors ReportSpec: {"run_dirs": [...], "figures": [...],
"sweep_dirs": [...], "out_dir": "..."}.
"""

import json
import sys

from . import ReportSpec, render_report


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m ksreports <spec.json>", file=sys.stderr)
        return 2
    spec = ReportSpec(**json.loads(open(argv[0]).read()))
    for path in render_report(spec):
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

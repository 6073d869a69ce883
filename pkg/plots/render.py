#!/usr/bin/env python3
"""Render figures from harness CSVs: ``python plots/render.py --spec spec.json``.

The spec file is a JSON document (or a list of them) with the fields

    figure   one of init-comparison | stability-sweep | benchmark-layers
             | benchmark-nodes | landscape
    inputs   list of CSV paths (aggregate CSVs, or scan CSVs for landscape)
    out      output image path; a PNG and an SVG sibling are written
    raw      optional raw CSV: every drawn statistic is re-derived from it
             and must match the aggregate within 1e-12
    y_scale  "linear" (default) or "log"
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from figlib import FigureSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--spec", required=True, help="figure spec JSON file")
    args = parser.parse_args(argv)

    doc = json.loads(Path(args.spec).read_text())
    specs = doc if isinstance(doc, list) else [doc]
    for entry in specs:
        for path in render(FigureSpec.from_dict(entry)):
            print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

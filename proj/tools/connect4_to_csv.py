#!/usr/bin/env python3
"""Converts connect-4.data (stdin) to numeric CSV (stdout).

Each of the 42 board cells becomes one ordinal feature: x -> 1, o -> -1,
b (blank) -> 0. The outcome is binarized for logistic regression: win -> 1,
loss or draw -> 0. The response is the last column, named "win".
"""

import csv
import sys

CELL = {"x": 1, "o": -1, "b": 0}
CELLS = 42


def main() -> int:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow([f"c{i}" for i in range(CELLS)] + ["win"])
    rows = 0
    for lineno, line in enumerate(sys.stdin, start=1):
        line = line.strip()
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != CELLS + 1:
            sys.exit(f"line {lineno}: expected {CELLS + 1} fields, found {len(fields)}")
        try:
            cells = [CELL[f] for f in fields[:CELLS]]
        except KeyError as e:
            sys.exit(f"line {lineno}: unknown cell value {e}")
        writer.writerow(cells + [1 if fields[CELLS] == "win" else 0])
        rows += 1
    print(f"{rows} rows", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())

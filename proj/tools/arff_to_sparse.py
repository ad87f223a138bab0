#!/usr/bin/env python3
"""Convert a Mulan-style multi-label ARFF file to the mlrank sparse format.

The last --labels attributes are the 0/1 label columns (emotions: 6, scene: 6).
Both dense and sparse ARFF data sections are accepted.

    tools/arff_to_sparse.py emotions.arff --labels 6 -o data/emotions.txt
"""

import argparse
import sys


def parse_arff(lines):
    attributes = 0
    rows = []
    in_data = False
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        lower = line.lower()
        if not in_data:
            if lower.startswith("@attribute"):
                attributes += 1
            elif lower.startswith("@data"):
                in_data = True
            continue
        if line.startswith("{"):
            values = {}
            for item in line.strip("{}").split(","):
                item = item.strip()
                if item:
                    index, value = item.split(None, 1)
                    values[int(index)] = float(value)
            rows.append([values.get(j, 0.0) for j in range(attributes)])
        else:
            rows.append([float(v) for v in line.split(",")])
    return attributes, rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("arff")
    parser.add_argument("--labels", type=int, required=True, help="number of trailing label attributes")
    parser.add_argument("-o", "--output", help="output path (default stdout)")
    args = parser.parse_args()

    with open(args.arff, encoding="utf-8", errors="replace") as f:
        attributes, rows = parse_arff(f)
    d = attributes - args.labels
    if d < 1 or args.labels < 2:
        sys.exit("need at least one feature and two labels")

    out = open(args.output, "w") if args.output else sys.stdout
    with out:
        out.write(f"{len(rows)} {d} {args.labels}\n")
        for row in rows:
            if len(row) != attributes:
                sys.exit(f"row with {len(row)} values, expected {attributes}")
            labels = [str(j) for j, v in enumerate(row[d:]) if v != 0.0]
            features = [f"{j + 1}:{v:.17g}" for j, v in enumerate(row[:d]) if v != 0.0]
            out.write(",".join(labels) + (" " if features else "") + " ".join(features) + "\n")


if __name__ == "__main__":
    main()

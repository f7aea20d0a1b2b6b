#!/usr/bin/env python3
"""Best-effort converter for the upstream acyclic-molecule distribution.

The upstream data set ships one ``.ct`` (chemical table) file per molecule
plus a ``.ds`` index pairing each file with its boiling point. This script
strips hydrogens, renumbers the heavy atoms, and writes the repository's own
graph JSON format next to a ``labels.csv`` index that
``permakernel.datasets.load_molecule_corpus`` understands.

Usage:
    python3 scripts/convert_acyclic.py --dataset dataset_bps.ds --src CT_DIR --dest OUT_DIR

The ``.ct`` layout handled here: a title line, a counts line
"<n_atoms> <n_bonds>", then atom lines "x y z SYMBOL" and bond lines
"i j order" with 1-based indices. Deviating files are reported and skipped.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from permakernel.datasets import save_graph_json  # noqa: E402
from permakernel.graphs import LabeledGraph  # noqa: E402


def parse_ct(path: Path) -> LabeledGraph:
    lines = [line.strip() for line in path.read_text().splitlines() if line.strip()]
    counts = lines[1].split()
    n_atoms, n_bonds = int(counts[0]), int(counts[1])
    symbols = []
    for line in lines[2 : 2 + n_atoms]:
        symbols.append(line.split()[3])
    bonds = []
    for line in lines[2 + n_atoms : 2 + n_atoms + n_bonds]:
        parts = line.split()
        bonds.append((int(parts[0]) - 1, int(parts[1]) - 1))
    heavy = [i for i, s in enumerate(symbols) if s.upper() != "H"]
    renumber = {old: new for new, old in enumerate(heavy)}
    labels = tuple(symbols[i] for i in heavy)
    edges = [
        (renumber[a], renumber[b])
        for a, b in bonds
        if a in renumber and b in renumber
    ]
    return LabeledGraph.from_edges(labels, edges)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dataset", required=True, help=".ds index file: '<name>.ct <bp>' lines")
    parser.add_argument("--src", required=True, help="directory containing the .ct files")
    parser.add_argument("--dest", required=True, help="output directory for JSON + labels.csv")
    args = parser.parse_args(argv)

    src = Path(args.src)
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    rows = []
    skipped = 0
    for lineno, line in enumerate(Path(args.dataset).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 2:
            print(f"{args.dataset}:{lineno}: skipping malformed line {line!r}", file=sys.stderr)
            skipped += 1
            continue
        name, value = parts[0], parts[1]
        try:
            graph = parse_ct(src / name)
            boiling_point = float(value)
        except (OSError, ValueError, IndexError) as exc:
            print(f"{src / name}: skipped ({exc})", file=sys.stderr)
            skipped += 1
            continue
        out_name = Path(name).with_suffix(".json").name
        save_graph_json(graph, dest / out_name)
        rows.append((out_name, boiling_point))

    with (dest / "labels.csv").open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(("file", "boiling_point_c"))
        writer.writerows(rows)
    print(f"converted {len(rows)} molecules to {dest} ({skipped} skipped)")
    return 0 if rows else 1


if __name__ == "__main__":
    sys.exit(main())

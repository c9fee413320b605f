#!/usr/bin/env python3
# Copyright 2026 The hiertext Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Normalizes the R8/R52 single-label Reuters splits to label<TAB>text.

Input files are the "all-terms" variants from
https://ana.cachopo.org/datasets-for-single-label-text-categorization
(r8-train-all-terms.txt, r8-test-all-terms.txt, r52-*-all-terms.txt), already
one "label<TAB>text" line per document. This script validates the labels
against the matching taxonomy (data/taxonomies/r8.txt or r52.txt leaves) and
collapses runs of whitespace inside the text.

Usage:
  scripts/prepare_reuters.py r8-train-all-terms.txt data/r8/train.tsv \
      --taxonomy data/taxonomies/r8.txt
"""

import argparse
import pathlib
import sys


def taxonomy_leaves(path: pathlib.Path) -> set:
    parents, children = set(), set()
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parent, _, child = line.partition("\t")
        parents.add(parent)
        children.add(child)
    return children - parents


def convert(source: pathlib.Path, destination: pathlib.Path, leaves: set) -> int:
    lines = []
    for number, raw in enumerate(source.read_text(encoding="latin-1").splitlines(), 1):
        raw = raw.strip()
        if not raw:
            continue
        label, separator, text = raw.partition("\t")
        if not separator:  # some mirrors use spaces instead of a tab
            label, _, text = raw.partition(" ")
        text = " ".join(text.split())
        if leaves and label not in leaves:
            raise SystemExit(f"{source}:{number}: label {label!r} is not a taxonomy leaf")
        if not text:
            raise SystemExit(f"{source}:{number}: document is empty")
        lines.append(f"{label}\t{text}\n")
    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_text("".join(lines), encoding="utf-8")
    return len(lines)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("source", type=pathlib.Path, help="*-all-terms.txt input file")
    parser.add_argument("destination", type=pathlib.Path, help="output TSV path")
    parser.add_argument("--taxonomy", type=pathlib.Path,
                        help="taxonomy whose leaves the labels must match")
    args = parser.parse_args()
    leaves = taxonomy_leaves(args.taxonomy) if args.taxonomy else set()
    count = convert(args.source, args.destination, leaves)
    print(f"wrote {count} examples to {args.destination}", file=sys.stderr)


if __name__ == "__main__":
    main()

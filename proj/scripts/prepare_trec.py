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
"""Converts the TREC question-classification corpus to label<TAB>text.

Input files are the originals from https://cogcomp.seas.upenn.edu/Data/QA/QC/
(train_5500.label and TREC_10.label), one question per line, fine label
first: "DESC:manner How did serfdom develop in and then leave Russia ?".
The fine labels (COARSE:fine) are exactly the leaves of
data/taxonomies/trec.txt.

Usage:
  scripts/prepare_trec.py train_5500.label data/trec/train.tsv
  scripts/prepare_trec.py TREC_10.label   data/trec/test.tsv
"""

import argparse
import pathlib
import sys


def convert(source: pathlib.Path, destination: pathlib.Path) -> int:
    lines = []
    # The distributed files are Latin-1, not UTF-8.
    for number, raw in enumerate(source.read_text(encoding="latin-1").splitlines(), 1):
        raw = raw.strip()
        if not raw:
            continue
        label, _, text = raw.partition(" ")
        if ":" not in label or not text.strip():
            raise SystemExit(f"{source}:{number}: unrecognized line: {raw[:60]!r}")
        lines.append(f"{label}\t{' '.join(text.split())}\n")
    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_text("".join(lines), encoding="utf-8")
    return len(lines)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("source", type=pathlib.Path, help="train_5500.label or TREC_10.label")
    parser.add_argument("destination", type=pathlib.Path, help="output TSV path")
    args = parser.parse_args()
    count = convert(args.source, args.destination)
    print(f"wrote {count} examples to {args.destination}", file=sys.stderr)


if __name__ == "__main__":
    main()

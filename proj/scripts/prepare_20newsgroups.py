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
"""Converts an extracted 20 Newsgroups tree to label<TAB>text.

Input is one split directory of the "20news-bydate" distribution
(http://qwone.com/~jason/20Newsgroups/): one subdirectory per newsgroup, one
message file per document. The newsgroup names are exactly the leaves of
data/taxonomies/20newsgroups.txt. RFC 822 headers (everything up to the
first blank line) are dropped unless --keep-headers is given.

Usage:
  scripts/prepare_20newsgroups.py 20news-bydate-train data/20ng/train.tsv
  scripts/prepare_20newsgroups.py 20news-bydate-test  data/20ng/test.tsv
"""

import argparse
import pathlib
import sys


def body_of(message: str, keep_headers: bool) -> str:
    if keep_headers:
        return message
    _, separator, body = message.partition("\n\n")
    return body if separator else message


def convert(source: pathlib.Path, destination: pathlib.Path, keep_headers: bool) -> int:
    lines = []
    for group in sorted(p for p in source.iterdir() if p.is_dir()):
        for document in sorted(group.iterdir()):
            message = document.read_text(encoding="latin-1")
            text = " ".join(body_of(message, keep_headers).split())
            if text:
                lines.append(f"{group.name}\t{text}\n")
    if not lines:
        raise SystemExit(f"{source}: no newsgroup directories with documents found")
    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_text("".join(lines), encoding="utf-8")
    return len(lines)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("source", type=pathlib.Path, help="20news-bydate-train or -test directory")
    parser.add_argument("destination", type=pathlib.Path, help="output TSV path")
    parser.add_argument("--keep-headers", action="store_true", help="keep RFC 822 headers")
    args = parser.parse_args()
    count = convert(args.source, args.destination, args.keep_headers)
    print(f"wrote {count} examples to {args.destination}", file=sys.stderr)


if __name__ == "__main__":
    main()

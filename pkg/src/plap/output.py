"""Deterministic CSV/JSON emission with configuration echo headers.

Floats are written with repr (shortest round-trip form), JSON with
sorted keys; no timestamps or environment data ever enter an output
file, so identical config and seed produce byte-identical files.
"""

import json
import os
from typing import Iterable, List, Sequence


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence],
              header_lines: List[str] = ()) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path, payload, header_lines: List[str] = ()) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    doc = {"config": list(header_lines), "result": payload}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")

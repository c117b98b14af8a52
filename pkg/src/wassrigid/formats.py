"""Plain-text file formats: measures, plans, result records and run configs.

Measure file::

    space sphere2 1.0
    # weight, then coordinates
    0.25 0.0 0.0 1.0
    0.75 1.0 0.0 0.0

Plan file: ``[source]`` and ``[target]`` measure blocks followed by a
``[plan]`` block of ``i j mass`` triples.  Floats are written with ``repr``
so they round-trip exactly.
"""

from __future__ import annotations

import configparser
import csv
import io
from pathlib import Path
from typing import Iterable

from .errors import FormatError
from .measures import AtomicMeasure
from .spaces import parse_space
from .transport import OptResult, TransportPlan


def _fmt(v) -> str:
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return repr(float(v))


def format_measure(mu: AtomicMeasure) -> str:
    lines = [f"space {mu.space.describe()}"]
    for atom, w in mu:
        lines.append(" ".join([_fmt(w)] + [_fmt(c) for c in atom.coords]))
    return "\n".join(lines) + "\n"


def _content_lines(text: str, first_line: int = 1):
    for k, raw in enumerate(text.splitlines(), start=first_line):
        s = raw.split("#", 1)[0].strip()
        if s:
            yield k, s


def parse_measure(text: str, first_line: int = 1) -> AtomicMeasure:
    lines = list(_content_lines(text, first_line))
    if not lines:
        raise FormatError("empty measure block", first_line)
    k, header = lines[0]
    if not header.startswith("space "):
        raise FormatError("measure block must start with 'space <descriptor>'", k)
    space = parse_space(header[len("space "):], k)
    atoms, weights = [], []
    for k, s in lines[1:]:
        parts = s.split()
        if len(parts) != 1 + space.dim:
            raise FormatError(f"expected weight and {space.dim} coordinate(s), got {len(parts)} fields", k)
        try:
            vals = [float(v) for v in parts]
            atoms.append(space.point(*vals[1:]))
        except ValueError as exc:
            raise FormatError(str(exc), k) from exc
        weights.append(vals[0])
    if not atoms:
        raise FormatError("measure has no atoms", k)
    try:
        return AtomicMeasure(space, atoms, weights)
    except ValueError as exc:
        raise FormatError(str(exc), lines[0][0]) from exc


def read_measure(path) -> AtomicMeasure:
    return parse_measure(Path(path).read_text())


def write_measure(path, mu: AtomicMeasure) -> None:
    Path(path).write_text(format_measure(mu))


def format_plan(plan: TransportPlan) -> str:
    out = ["[source]", format_measure(plan.source).rstrip("\n"), "[target]", format_measure(plan.target).rstrip("\n"), "[plan]"]
    out += [f"{i} {j} {_fmt(m)}" for i, j, m in plan.entries]
    return "\n".join(out) + "\n"


def parse_plan(text: str) -> TransportPlan:
    blocks: dict[str, list] = {}
    current = None
    for k, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s in ("[source]", "[target]", "[plan]"):
            current = s[1:-1]
            blocks[current] = [k + 1, []]
        elif current is not None:
            blocks[current][1].append(raw)
        elif s and not s.startswith("#"):
            raise FormatError("content before the first block", k)
    for name in ("source", "target", "plan"):
        if name not in blocks:
            raise FormatError(f"missing [{name}] block")
    src = parse_measure("\n".join(blocks["source"][1]), blocks["source"][0])
    tgt = parse_measure("\n".join(blocks["target"][1]), blocks["target"][0])
    entries = []
    for k, s in _content_lines("\n".join(blocks["plan"][1]), blocks["plan"][0]):
        parts = s.split()
        if len(parts) != 3:
            raise FormatError("plan lines are 'i j mass'", k)
        try:
            entries.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise FormatError(str(exc), k) from exc
    return TransportPlan(src, tgt, tuple(entries))


def format_result(result: OptResult) -> str:
    rec = {
        "cost": _fmt(result.total_cost),
        "wp": _fmt(result.wp),
        "p": _fmt(result.p),
        "unique": result.unique,
        "entries": str(len(result.plan.entries)),
    }
    return "".join(f"{k} = {v}\n" for k, v in rec.items())


def parse_record(text: str) -> dict:
    out = {}
    for k, s in _content_lines(text):
        if "=" not in s:
            raise FormatError("expected 'key = value'", k)
        key, val = s.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def format_csv(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def write_csv(path, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    Path(path).write_text(format_csv(header, rows))


def read_config(path) -> configparser.ConfigParser:
    """Flat INI-style config: ``key = value`` lines under ``[section]`` headers."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise FormatError(f"bad config {path}: {exc}") from exc
    return cp

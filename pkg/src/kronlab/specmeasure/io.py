"""Measure serialization: JSON, a line-oriented text form, and CSV atom lists."""

from __future__ import annotations

import csv
import io
import json
import warnings
from fractions import Fraction
from typing import Mapping

from ..numkit import SymbolicReal, format_fraction
from .measure import NUMERIC, SYMBOLIC, Measure, position_text


class MeasureParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line, self.column = line, column
        super().__init__(f"line {line}, column {column}: {message}")


def number_text(x) -> str:
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return format_fraction(Fraction(x))
    if isinstance(x, Fraction):
        return format_fraction(x)
    return repr(float(x))


def parse_number(text: str):
    """``"p/q"`` and integers parse exactly; anything with a point or exponent is a float."""
    t = str(text).strip()
    if "/" in t or t.lstrip("+-").isdigit():
        return Fraction(t)
    return float(t)


def _parse_position(text: str, tier: str):
    if tier == SYMBOLIC:
        return SymbolicReal.parse(text)
    return float(parse_number(text))


def to_dict(m: Measure) -> dict:
    return {
        "atoms": [{"pos": position_text(p), "w": number_text(w)} for p, w in m.atoms],
        "density": [{"l": number_text(l), "u": number_text(u), "level": number_text(v)}
                    for l, u, v in m.density],
        "tier": m.tier,
    }


def from_dict(d: Mapping) -> Measure:
    tier = d.get("tier", SYMBOLIC)
    if tier not in (SYMBOLIC, NUMERIC):
        raise ValueError(f"unknown tier {tier!r}")
    atoms = [(_parse_position(a["pos"], tier), parse_number(a["w"])) for a in d.get("atoms", [])]
    dens = [(parse_number(p["l"]), parse_number(p["u"]), parse_number(p["level"]))
            for p in d.get("density", [])]
    return Measure.build(atoms, dens, tier)


def dumps_json(m: Measure) -> str:
    return json.dumps(to_dict(m), indent=2) + "\n"


def loads_json(text: str) -> Measure:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeasureParseError(exc.msg, exc.lineno, exc.colno) from exc
    try:
        return from_dict(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise MeasureParseError(f"invalid measure: {exc}", 1, 1) from exc


# Text form, one record per line, tab separated:
#   tier<TAB>symbolic
#   atom<TAB><position><TAB><weight>
#   density<TAB><l><TAB><u><TAB><level>

def dumps_text(m: Measure) -> str:
    lines = [f"tier\t{m.tier}"]
    lines += [f"atom\t{position_text(p)}\t{number_text(w)}" for p, w in m.atoms]
    lines += [f"density\t{number_text(l)}\t{number_text(u)}\t{number_text(v)}"
              for l, u, v in m.density]
    return "\n".join(lines) + "\n"


def loads_text(text: str) -> Measure:
    tier = None
    atoms, dens = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        fields = raw.split("\t")
        kind = fields[0].strip()
        try:
            if kind == "tier" and len(fields) == 2:
                tier = fields[1].strip()
                if tier not in (SYMBOLIC, NUMERIC):
                    raise ValueError(f"unknown tier {tier!r}")
            elif kind == "atom" and len(fields) == 3:
                atoms.append((fields[1], parse_number(fields[2]), lineno))
            elif kind == "density" and len(fields) == 4:
                dens.append(tuple(parse_number(f) for f in fields[1:]))
            else:
                raise ValueError(f"unrecognized record {kind!r} with {len(fields)} fields")
        except (ValueError, ZeroDivisionError) as exc:
            raise MeasureParseError(str(exc), lineno, 1) from exc
    tier = tier or SYMBOLIC
    parsed = []
    for p, w, lineno in atoms:
        try:
            parsed.append((_parse_position(p, tier), w))
        except (ValueError, ZeroDivisionError) as exc:
            raise MeasureParseError(str(exc), lineno, len("atom") + 2) from exc
    try:
        return Measure.build(parsed, dens, tier)
    except ValueError as exc:
        raise MeasureParseError(str(exc), 1, 1) from exc


def dumps_csv(m: Measure) -> str:
    if m.density:
        raise ValueError("CSV holds atom lists only; this measure has a density part")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pos", "w"])
    for p, wt in m.atoms:
        w.writerow([position_text(p), number_text(wt)])
    return buf.getvalue()


def loads_csv(text: str, tier: str | None = None, strict: bool = False) -> Measure:
    """Atom list ``pos,w`` with a header row; duplicates merge (warning) or raise when ``strict``."""
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or [c.strip() for c in rows[0]] != ["pos", "w"]:
        raise MeasureParseError("expected header 'pos,w'", 1, 1)
    raw = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 2:
            raise MeasureParseError(f"expected 2 fields, got {len(row)}", lineno, 1)
        try:
            raw.append((row[0].strip(), parse_number(row[1]), lineno))
        except (ValueError, ZeroDivisionError) as exc:
            raise MeasureParseError(str(exc), lineno, len(row[0]) + 2) from exc
    if tier is None:
        numeric = any(_looks_float(p) for p, _, _ in raw)
        tier = NUMERIC if numeric else SYMBOLIC
    atoms, seen = [], {}
    for p, wt, lineno in raw:
        try:
            pos = _parse_position(p, tier)
        except ValueError as exc:
            raise MeasureParseError(str(exc), lineno, 1) from exc
        if pos in seen:
            msg = f"duplicate position {p} (lines {seen[pos]} and {lineno})"
            if strict:
                raise MeasureParseError(msg, lineno, 1)
            warnings.warn(msg + "; weights merged", stacklevel=2)
        seen.setdefault(pos, lineno)
        atoms.append((pos, wt))
    return Measure.build(atoms, (), tier)


def _looks_float(text: str) -> bool:
    try:
        return isinstance(parse_number(text), float)
    except ValueError:
        return False


def load(path: str, fmt: str | None = None, **kw) -> Measure:
    fmt = fmt or guess_format(path)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "csv":
        return loads_csv(text, **kw)
    return {"json": loads_json, "text": loads_text}[fmt](text)


def dump(m: Measure, path: str, fmt: str | None = None) -> None:
    fmt = fmt or guess_format(path)
    text = {"json": dumps_json, "text": dumps_text, "csv": dumps_csv}[fmt](m)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def guess_format(path: str) -> str:
    p = path.lower()
    if p.endswith(".json"):
        return "json"
    if p.endswith(".csv"):
        return "csv"
    return "text"

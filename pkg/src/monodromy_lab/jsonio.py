"""Deterministic JSON helpers and rational string formatting."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path


def frac_str(q: Fraction) -> str:
    """Serialize a rational as "p/q" with an explicit positive denominator."""
    f = Fraction(q)
    return f"{f.numerator}/{f.denominator}"


def parse_frac(text: str) -> Fraction:
    return Fraction(text.strip())


def fmt_float(x: float) -> float:
    """Round-trip-safe float for reports; normalizes -0.0 to 0.0."""
    return 0.0 if x == 0 else float(x)


def dump_json(obj, path: str | Path | None = None) -> str:
    """Serialize with sorted keys and a fixed layout so runs are diffable."""
    text = json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text

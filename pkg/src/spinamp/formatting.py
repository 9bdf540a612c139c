"""Number formatting shared by the CLI renderers.

Text (CSV, pretty) values are written with 12 significant digits.  JSON
numbers keep full double precision, since 12 digits cannot hold entries
above 1 (operator matrices) to 1e-12.  Everywhere, magnitudes below
``ZERO_SNAP`` print as 0 so rounding noise does not leak into tables.
"""
from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Sequence

SIG_DIGITS = 12
ZERO_SNAP = 5e-15


def snap(x: float) -> float:
    x = float(x)
    return 0.0 if abs(x) < ZERO_SNAP else x


def clean(x: float) -> float:
    return float(f"{snap(x):.{SIG_DIGITS}g}")


def fmt_real(x: float) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{clean(x):.{SIG_DIGITS}g}"


def fmt_complex(z: complex) -> str:
    """``a+bi`` with 12 significant digits per part."""
    re, im = clean(z.real), clean(z.imag)
    return f"{re:.{SIG_DIGITS}g}{im:+.{SIG_DIGITS}g}i"


def complex_json(z: complex) -> dict:
    return {"re": snap(z.real), "im": snap(z.imag)}


def json_number(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return snap(x)


def matrix_json(mat) -> list[list[dict]]:
    return [[complex_json(complex(v)) for v in row] for row in mat]


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def aligned(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    """Right-aligned text table with a rule under the header."""
    rows = [list(map(str, r)) for r in rows]
    widths = [len(h) for h in header]
    for r in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, r)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(lines)

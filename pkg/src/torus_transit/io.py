"""JSON systems and CSV reports.

Systems are stored with integer matrices as JSON integers and every other
rational as a "p/q" string, so a file round-trips exactly.  CSV reports
start with a ``# config: {...}`` comment carrying the resolved run
configuration, then a header row; floats use 17 significant digits.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path

from .errors import InvalidInputError
from .model import AffineBaseMap, PiecewiseLinearCircleMap, SkewProductSystem
from .rational import format_rational


def system_to_dict(sys: SkewProductSystem) -> dict:
    return {
        "n": sys.n,
        "base": {
            "matrix": [list(row) for row in sys.base.matrix],
            "translation": [format_rational(x) for x in sys.base.translation],
        },
        "coupling": list(sys.coupling),
        "fiber_offset": format_rational(sys.fiber_offset),
        "fiber": {
            "breakpoints": [format_rational(x) for x in sys.fiber.breakpoints],
            "lift_values": [format_rational(x) for x in sys.fiber.lift_values],
        },
    }


def _field(doc, *path):
    node = doc
    for key in path:
        if not isinstance(node, dict) or key not in node:
            raise InvalidInputError(f"missing field {'.'.join(path)}")
        node = node[key]
    return node


def _no_floats(node, where):
    if isinstance(node, float):
        raise InvalidInputError(f"{where}: float {node!r} refused, write rationals as \"p/q\"")
    if isinstance(node, list):
        for i, v in enumerate(node):
            _no_floats(v, f"{where}[{i}]")


def system_from_dict(doc: dict) -> SkewProductSystem:
    """Build a system from a parsed document, or from ``{"system": {...}}``."""
    if isinstance(doc, dict) and "system" in doc and "base" not in doc:
        doc = doc["system"]
    if not isinstance(doc, dict):
        raise InvalidInputError("a system document must be a JSON object")
    fields = {
        "matrix": _field(doc, "base", "matrix"),
        "translation": _field(doc, "base", "translation"),
        "coupling": _field(doc, "coupling"),
        "fiber_offset": _field(doc, "fiber_offset"),
        "breakpoints": _field(doc, "fiber", "breakpoints"),
        "lift_values": _field(doc, "fiber", "lift_values"),
    }
    for name, value in fields.items():
        _no_floats(value, name)
    matrix = fields["matrix"]
    if not isinstance(matrix, list) or not all(isinstance(r, list) for r in matrix):
        raise InvalidInputError("base.matrix must be a list of rows")
    coupling = fields["coupling"]
    if not isinstance(coupling, list):
        raise InvalidInputError("coupling must be a list")
    base = AffineBaseMap(tuple(tuple(r) for r in matrix), tuple(fields["translation"]))
    fiber = PiecewiseLinearCircleMap(tuple(fields["breakpoints"]), tuple(fields["lift_values"]))
    sys = SkewProductSystem(base, tuple(coupling), fields["fiber_offset"], fiber)
    if "n" in doc and doc["n"] != sys.n:
        raise InvalidInputError(f"declared n = {doc['n']} but the data has dimension {sys.n}")
    return sys


def dumps_json(node, indent: int = 0) -> str:
    """Indented JSON with lists of scalars kept on one line."""
    pad = "  " * (indent + 1)
    if isinstance(node, dict):
        if not node:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps_json(v, indent + 1)}" for k, v in node.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(node, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in node):
            return "[" + ", ".join(json.dumps(v) for v in node) + "]"
        items = [pad + dumps_json(v, indent + 1) for v in node]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    return json.dumps(node)


def dumps_system(sys: SkewProductSystem, extra: dict | None = None) -> str:
    doc = system_to_dict(sys)
    if extra:
        doc = {"system": doc, **extra}
    return dumps_json(doc) + "\n"


def loads_system(text: str) -> SkewProductSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"malformed JSON: {exc}") from None
    return system_from_dict(doc)


def load_system(path) -> SkewProductSystem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from None
    return loads_system(text)


# -- CSV -----------------------------------------------------------------------

def fmt_float(x) -> str:
    return format(float(x), ".17g")


def _cell(v) -> str:
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, Fraction):
        return format_rational(v)
    if hasattr(v, "dtype"):
        return fmt_float(v) if v.dtype.kind == "f" else str(v)
    return str(v)


def write_csv(stream, header, rows, config: dict | None = None) -> None:
    if config is not None:
        stream.write("# config: " + json.dumps(config, sort_keys=True, default=str) + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])


def read_csv(stream) -> tuple[dict | None, list[str], list[list[str]]]:
    """Inverse of :func:`write_csv`: ``(config, header, rows)``."""
    config = None
    lines = stream.read().splitlines()
    if lines and lines[0].startswith("# config: "):
        config = json.loads(lines[0][len("# config: "):])
        lines = lines[1:]
    table = list(csv.reader(lines))
    return config, table[0], table[1:]


def orbit_rows(points):
    return ([step, *p] for step, p in enumerate(points))


def orbit_header(n: int) -> list[str]:
    return ["step", *(f"x{i + 1}" for i in range(n))]


def surface_header(m: int) -> list[str]:
    return [*(f"x{i + 1}" for i in range(m)), "a", "b", "depth"]


def surface_rows(samples):
    return ([*(float(v) for v in s.x), s.a, s.b, s.depth] for s in samples)

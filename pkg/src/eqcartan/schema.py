"""JSON document format, schema validation and deterministic serialization.

A workbench document is a single JSON object carrying the scalar setup and
any of the optional blocks (complex, d_family, lambda_family, iota_family,
quantum_ring, z2_data, cone).  The schema rejects unknown fields so typos
fail loudly instead of being silently ignored.  Scalars inside documents
are strings in the Novikov grammar, e.g. "q^2 - 3*q^(1/2)".

Reports are serialized with ``dumps``: sorted keys, fixed indentation,
arithmetic objects rendered through their canonical text form — two runs
on the same input produce identical bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, Optional, Tuple

import jsonschema

from .novikov import NovikovElem, NovikovError, ScalarSetup, USeries
from .complexes import GeneratorInfo, GradedComplex, GradingKind, OperatorMatrix
from .cartan import CartanData, EquivariantDifferential
from .quantum import QuantumRing
from .finite2 import Z2CartanData

__all__ = ["SCHEMA", "DocumentError", "load_document", "dumps", "jsonify",
           "setup_from", "complex_from", "differential_family_from",
           "cartan_from", "quantum_from", "z2_from", "cone_from"]


class DocumentError(ValueError):
    """Malformed input document (schema or content level)."""


_ENTRY = {
    "type": "object",
    "additionalProperties": False,
    "required": ["target", "source", "value"],
    "properties": {
        "target": {"type": "string"},
        "source": {"type": "string"},
        "value": {"type": "string"},
    },
}

_ENTRIES = {"type": "array", "items": _ENTRY}

_GENERATOR = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name"],
    "properties": {
        "name": {"type": "string"},
        "index": {"type": "integer"},
    },
}

_GRADING = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["Z", "Z/2", "Z/2m"]},
        "m": {"type": "integer", "minimum": 1},
    },
}

_COMPLEX = {
    "type": "object",
    "additionalProperties": False,
    "required": ["generators", "differential"],
    "properties": {
        "grading": _GRADING,
        "generators": {"type": "array", "items": _GENERATOR, "minItems": 1},
        "q_degree_two": {"type": "boolean"},
        "differential": {
            "type": "object",
            "additionalProperties": False,
            "required": ["entries"],
            "properties": {
                "degree": {"type": "integer"},
                "entries": _ENTRIES,
            },
        },
    },
}

_FAMILY = {
    "type": "object",
    "additionalProperties": False,
    "required": ["components"],
    "properties": {
        "order": {"type": "integer", "minimum": 1},
        "components": {"type": "array", "items": _ENTRIES, "minItems": 1},
    },
}

_IOTA_FAMILY = {
    "type": "object",
    "additionalProperties": False,
    "required": ["components"],
    "properties": {
        "regime": {"enum": ["monotone", "cy"]},
        "components": {"type": "array", "items": _ENTRIES},
    },
}

_QUANTUM = {
    "type": "object",
    "additionalProperties": False,
    "required": ["basis", "unit", "table"],
    "properties": {
        "basis": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name", "degree"],
                "properties": {
                    "name": {"type": "string"},
                    "degree": {"type": "integer"},
                },
            },
        },
        "unit": {"type": "string"},
        "omega": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["term", "value"],
                "properties": {
                    "term": {"type": "string"},
                    "value": {"type": "string"},
                },
            },
        },
        "table": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["left", "right", "terms"],
                "properties": {
                    "left": {"type": "string"},
                    "right": {"type": "string"},
                    "terms": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["term", "value"],
                            "properties": {
                                "term": {"type": "string"},
                                "value": {"type": "string"},
                            },
                        },
                    },
                },
            },
        },
    },
}

_Z2 = {
    "type": "object",
    "additionalProperties": False,
    "required": ["generators"],
    "properties": {
        "generators": {"type": "array", "items": _GENERATOR, "minItems": 1},
        "operators": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                name: _ENTRIES
                for name in ("d", "iota", "lambda", "sigma", "Sigma",
                             "xi", "Xi")
            },
        },
    },
}

_CONE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["minus", "plus", "map"],
    "properties": {
        "minus": _COMPLEX,
        "plus": _COMPLEX,
        "map": _ENTRIES,
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "eqcartan workbench document",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "scalar_setup"],
    "properties": {
        "schema_version": {"const": 1},
        "scalar_setup": {
            "type": "object",
            "additionalProperties": False,
            "required": ["lattice_generator", "coefficients"],
            "properties": {
                "lattice_generator": {"type": "string"},
                "coefficients": {"type": "string"},
            },
        },
        "complex": _COMPLEX,
        "d_family": _FAMILY,
        "lambda_family": _FAMILY,
        "iota_family": _IOTA_FAMILY,
        "quantum_ring": _QUANTUM,
        "z2_data": _Z2,
        "cone": _CONE,
    },
}


def load_document(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DocumentError(f"cannot read document: {exc}") from exc
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise DocumentError(
            f"schema violation at {'/'.join(str(p) for p in exc.absolute_path)}"
            f": {exc.message}"
        ) from exc
    return doc


# -- builders -----------------------------------------------------------------


def setup_from(doc: dict) -> ScalarSetup:
    block = doc["scalar_setup"]
    try:
        return ScalarSetup.make(Fraction(block["lattice_generator"]),
                                block["coefficients"])
    except (NovikovError, ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"bad scalar setup: {exc}") from exc


def _grading_from(block: Optional[dict]) -> GradingKind:
    if not block:
        return GradingKind("Z")
    if block["kind"] == "Z/2m":
        if "m" not in block:
            raise DocumentError("grading kind Z/2m requires field m")
        return GradingKind("Z/2m", block["m"])
    return GradingKind(block["kind"])


def _generators_from(items) -> Tuple[GeneratorInfo, ...]:
    names = [g["name"] for g in items]
    if len(set(names)) != len(names):
        raise DocumentError("duplicate generator names")
    return tuple(GeneratorInfo(g["name"], g.get("index", 0)) for g in items)


def _entries_from(items, basis, setup) -> Dict[Tuple[int, int], NovikovElem]:
    pos = {g.name: i for i, g in enumerate(basis)}
    out: Dict[Tuple[int, int], NovikovElem] = {}
    for e in items:
        for role in ("target", "source"):
            if e[role] not in pos:
                raise DocumentError(f"unknown generator {e[role]!r}")
        try:
            v = setup.parse(e["value"])
        except NovikovError as exc:
            raise DocumentError(
                f"bad scalar {e['value']!r} at ({e['target']},{e['source']}):"
                f" {exc}") from exc
        key = (pos[e["target"]], pos[e["source"]])
        out[key] = out[key] + v if key in out else v
    return out


def complex_from(doc: dict) -> GradedComplex:
    if "complex" not in doc:
        raise DocumentError("document has no 'complex' block")
    block = doc["complex"]
    setup = setup_from(doc)
    grading = _grading_from(block.get("grading"))
    basis = _generators_from(block["generators"])
    entries = _entries_from(block["differential"]["entries"], basis, setup)
    d = OperatorMatrix(basis, basis, entries,
                       block["differential"].get("degree", 1))
    return GradedComplex(setup, grading, basis, d,
                         block.get("q_degree_two", False))


def differential_family_from(doc: dict,
                             default_order: Optional[int] = None
                             ) -> EquivariantDifferential:
    if "complex" not in doc:
        raise DocumentError("d_family needs a 'complex' block for its basis")
    C = complex_from(doc)
    if "d_family" not in doc:
        # fall back: the complex differential is the only component
        return EquivariantDifferential(
            C.setup, C.grading, C.basis, (C.d,),
            default_order or 0)
    block = doc["d_family"]
    comps = []
    for k, items in enumerate(block["components"]):
        entries = _entries_from(items, C.basis, C.setup)
        comps.append(OperatorMatrix(C.basis, C.basis, entries, 1 - 2 * k))
    order = block.get("order", default_order or 0)
    return EquivariantDifferential(C.setup, C.grading, C.basis,
                                   tuple(comps), order or 0)


def cartan_from(doc: dict,
                default_order: Optional[int] = None) -> CartanData:
    diff = differential_family_from(doc, default_order)
    regime = "monotone"
    iota_ops = ()
    if "iota_family" in doc:
        block = doc["iota_family"]
        regime = block.get("regime", "monotone")
        ops = []
        for k, items in enumerate(block["components"]):
            entries = _entries_from(items, diff.basis, diff.setup)
            deg = -2 * k if regime == "cy" else 2 - 2 * k
            ops.append(OperatorMatrix(diff.basis, diff.basis, entries, deg))
        iota_ops = tuple(ops)
    return CartanData(diff, iota_ops, regime)


def lambda_family_from(doc: dict, diff: EquivariantDifferential):
    if "lambda_family" not in doc:
        return None
    out = []
    for items in doc["lambda_family"]["components"]:
        out.append(_entries_from(items, diff.basis, diff.setup))
    return out


def quantum_from(doc: dict) -> QuantumRing:
    if "quantum_ring" not in doc:
        raise DocumentError("document has no 'quantum_ring' block")
    block = doc["quantum_ring"]
    setup = setup_from(doc)
    basis = tuple(GeneratorInfo(b["name"], b["degree"])
                  for b in block["basis"])
    pos = {g.name: i for i, g in enumerate(basis)}
    if len(pos) != len(basis):
        raise DocumentError("duplicate quantum basis names")
    if block["unit"] not in pos:
        raise DocumentError(f"unknown unit {block['unit']!r}")

    def column(terms):
        col = {}
        for t in terms:
            if t["term"] not in pos:
                raise DocumentError(f"unknown class {t['term']!r}")
            try:
                v = setup.parse(t["value"])
            except NovikovError as exc:
                raise DocumentError(f"bad scalar {t['value']!r}: {exc}") from exc
            k = pos[t["term"]]
            col[k] = col[k] + v if k in col else v
        return col

    table = {}
    for row in block["table"]:
        for role in ("left", "right"):
            if row[role] not in pos:
                raise DocumentError(f"unknown class {row[role]!r}")
        table[(pos[row["left"]], pos[row["right"]])] = column(row["terms"])
    omega = column(block.get("omega", []))
    return QuantumRing(setup, basis, table, pos[block["unit"]], omega)


def z2_from(doc: dict) -> Z2CartanData:
    if "z2_data" not in doc:
        raise DocumentError("document has no 'z2_data' block")
    block = doc["z2_data"]
    setup = setup_from(doc)
    basis = _generators_from(block["generators"])
    ops = block.get("operators", {})
    maps = {}
    for json_name, field in (("d", "d"), ("iota", "iota"),
                             ("lambda", "lam"), ("sigma", "sigma"),
                             ("Sigma", "Sigma"), ("xi", "xi"), ("Xi", "Xi")):
        maps[field] = _entries_from(ops.get(json_name, []), basis, setup)
    return Z2CartanData.build(setup, basis, **maps)


def cone_from(doc: dict):
    if "cone" not in doc:
        raise DocumentError("document has no 'cone' block")
    block = doc["cone"]
    setup = setup_from(doc)

    def side(sub):
        grading = _grading_from(sub.get("grading"))
        basis = _generators_from(sub["generators"])
        entries = _entries_from(sub["differential"]["entries"], basis, setup)
        d = OperatorMatrix(basis, basis, entries,
                           sub["differential"].get("degree", 1))
        return GradedComplex(setup, grading, basis, d,
                             sub.get("q_degree_two", False))

    minus = side(block["minus"])
    plus = side(block["plus"])
    # chain map entries: targets in minus, sources in plus
    pos_m = {g.name: i for i, g in enumerate(minus.basis)}
    pos_p = {g.name: i for i, g in enumerate(plus.basis)}
    entries = {}
    for e in block["map"]:
        if e["target"] not in pos_m:
            raise DocumentError(f"unknown target generator {e['target']!r}")
        if e["source"] not in pos_p:
            raise DocumentError(f"unknown source generator {e['source']!r}")
        try:
            v = setup.parse(e["value"])
        except NovikovError as exc:
            raise DocumentError(f"bad scalar {e['value']!r}: {exc}") from exc
        key = (pos_m[e["target"]], pos_p[e["source"]])
        entries[key] = entries[key] + v if key in entries else v
    cmap = OperatorMatrix(plus.basis, minus.basis, entries, 0)
    return cmap, minus, plus


# -- deterministic output -----------------------------------------------------


def jsonify(obj):
    """Recursively convert report objects to JSON-safe primitives."""
    if isinstance(obj, (NovikovElem, USeries, Fraction)):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    if isinstance(obj, float):
        return float(obj)
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return jsonify(obj.item())
    if isinstance(obj, GeneratorInfo):
        return {"name": obj.name, "index": obj.index}
    return obj


def dumps(report) -> str:
    return json.dumps(jsonify(report), sort_keys=True, indent=2) + "\n"

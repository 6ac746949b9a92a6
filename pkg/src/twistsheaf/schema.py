"""JSON schemas for problem documents, one payload schema per command.

Rationals travel as integers or [numerator, denominator] pairs; matrices
are row-major lists of rows.  Every object is closed: unknown keys fail
validation instead of being dropped.
"""

from __future__ import annotations

import copy

import jsonschema

from .errors import SchemaError

VERSION = "twistsheaf/1"

RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {
            "type": "array",
            "items": {"type": "integer"},
            "minItems": 2,
            "maxItems": 2,
        },
    ]
}
RAT_VECTOR = {"type": "array", "items": RATIONAL}
MATRIX = {"type": "array", "items": RAT_VECTOR, "minItems": 1}
REAL = {"type": "number"}


def _obj(properties: dict, required: tuple = ()) -> dict:
    return {
        "type": "object",
        "properties": properties,
        "required": list(required),
        "additionalProperties": False,
    }


MONODROMY = _obj(
    {
        "dim": {"type": "integer", "minimum": 1},
        "blocks": {
            "type": "array",
            "minItems": 1,
            "items": _obj({"alpha": RAT_VECTOR, "vectors": MATRIX}, ("alpha", "vectors")),
        },
        "nilpotents": {"type": "array", "items": MATRIX},
    },
    ("dim", "blocks"),
)

HODGE = _obj(
    {
        "weight": {"type": "integer"},
        "dims": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "array",
                "items": {"type": "integer"},
                "minItems": 3,
                "maxItems": 3,
            },
        },
        "selector": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    },
    ("weight", "dims", "selector"),
)

CURVE = {
    "oneOf": [
        _obj(
            {
                "catalog": {"enum": ["axis-z", "axis-w", "node", "cusp", "smooth"]},
                "params": {"type": "array", "items": RATIONAL},
            },
            ("catalog",),
        ),
        _obj({"polynomial": {"type": "string", "minLength": 1}}, ("polynomial",)),
    ]
}

DIVISOR = {
    "type": "array",
    "items": _obj({"curve": CURVE, "coeff": RATIONAL}, ("curve", "coeff")),
}

CENTER = {
    "oneOf": [
        _obj(
            {
                "meet": {
                    "type": "array",
                    "items": {"type": "string"},
                    "minItems": 2,
                    "maxItems": 2,
                }
            },
            ("meet",),
        ),
        _obj({"free": {"type": "string"}, "lam": RATIONAL}, ("free", "lam")),
    ]
}

SECTION = _obj(
    {
        "rank": {"type": "integer", "minimum": 1},
        "n_boundary": {"type": "integer", "minimum": 1},
        "n_interior": {"type": "integer", "minimum": 0},
        "terms": {
            "type": "array",
            "items": _obj(
                {
                    "exps": {"type": "array", "items": {"type": "integer"}},
                    "coeffs": RAT_VECTOR,
                },
                ("exps", "coeffs"),
            ),
        },
    },
    ("rank", "n_boundary", "terms"),
)

MODEL_ID = {"type": "string"}

PAYLOADS = {
    "weightfilt": _obj({"nilpotents": {"type": "array", "items": MATRIX, "minItems": 1}}, ("nilpotents",)),
    "prolong": _obj({"monodromy": MONODROMY, "a": RAT_VECTOR}, ("monodromy", "a")),
    "ssheaf-gens": _obj(
        {
            "monodromy": MONODROMY,
            "hodge": HODGE,
            "twist": _obj({"r": RAT_VECTOR, "m": {"type": "integer", "minimum": 1}}, ("r",)),
        },
        ("monodromy", "hodge", "twist"),
    ),
    "l2-test": {
        "oneOf": [
            _obj({"v": {"type": "integer"}, "a": RATIONAL}, ("v", "a")),
            _obj({"section": SECTION, "weights": MATRIX}, ("section", "weights")),
        ]
    },
    "cks-scan": _obj(
        {
            "model": MODEL_ID,
            "vector": {"oneOf": [{"type": "integer", "minimum": 0}, {"type": "array", "items": REAL}]},
            "epsilon": REAL,
        },
        ("model", "vector"),
    ),
    "nakano-check": _obj({"model": MODEL_ID, "step": REAL}, ("model",)),
    "resolve": _obj({"divisor": DIVISOR}, ("divisor",)),
    "mult-ideal": _obj(
        {"divisor": DIVISOR, "extra_blowups": {"type": "array", "items": CENTER}},
        ("divisor",),
    ),
    "jump-scan": _obj(
        {
            "divisor": DIVISOR,
            "grid": {
                "oneOf": [
                    {"type": "array", "items": RATIONAL, "minItems": 1},
                    _obj({"start": RATIONAL, "stop": RATIONAL, "step": RATIONAL}, ("start", "stop", "step")),
                ]
            },
        },
        ("divisor", "grid"),
    ),
    "tame-check": _obj(
        {"model": MODEL_ID, "reference": {"type": "array", "items": {"type": "array", "items": REAL}}},
        ("model",),
    ),
    "metric-at": _obj(
        {
            "model": MODEL_ID,
            "t": {"type": "array", "items": REAL, "minItems": 1},
            "arg": {"type": "array", "items": REAL},
            "frame": {"enum": ["reference", "adapted"]},
        },
        ("model", "t"),
    ),
}

OPTIONS = _obj(
    {
        "oracle": {"enum": ["symbolic", "numeric", "both"]},
        "degree_bound": {"type": "integer", "minimum": 0},
        "samples": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "tolerance": RATIONAL,
    }
)


def document_schema(command: str) -> dict:
    return _obj(
        {
            "version": {"const": VERSION},
            "command": {"const": command},
            "payload": PAYLOADS[command],
            "options": OPTIONS,
        },
        ("payload",),
    )


def validate(document: object, command: str) -> None:
    """Raises SchemaError naming the offending JSON path."""
    if command not in PAYLOADS:
        raise SchemaError(f"unknown command {command!r}", field="command")
    validator = jsonschema.Draft202012Validator(document_schema(command))
    errors = sorted(validator.iter_errors(document), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise SchemaError(f"{path}: {err.message}", field=path)


def all_schemas() -> dict:
    return {cmd: copy.deepcopy(document_schema(cmd)) for cmd in PAYLOADS}

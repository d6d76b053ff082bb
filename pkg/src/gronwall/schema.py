"""JSON schemas for problem specs and reports, plus coefficient ingestion.

A coefficient (``A``, ``B``, ``C`` of a Volterra inequality, or a factor of a
separable kernel) is one of

* a number (constant),
* a list of node values (length ``grid.n``),
* a named closed form ``{"form": "constant" | "linear" | "exp" | "sin", ...}``
  evaluated at ``u = t - a``:
  ``constant: value``, ``linear: c0 + c1 u``, ``exp: c exp(rate u)``,
  ``sin: c0 + amp sin(omega u + phase)``.

Discrete sequences use 0-based indices: ``A[0..m-1]`` and ``B[0..m-2]``; an
inequality written for ``k = a..b`` maps to index ``k - a``.
"""
import numpy as np

from .errors import ParameterError

KINDS = ("classic", "varcoef", "kernel", "matrix", "discrete", "maxprin", "semilinear", "resolvent")

_num = {"type": "number"}
_nonneg = {"type": "number", "minimum": 0}
_vector = {"type": "array", "items": _num, "minItems": 1}
_matrix = {"type": "array", "items": _vector, "minItems": 1}

_closed_form = {
    "type": "object",
    "required": ["form"],
    "properties": {
        "form": {"enum": ["constant", "linear", "exp", "sin"]},
        "value": _num, "c0": _num, "c1": _num, "c": _num, "rate": _num,
        "amp": _num, "omega": _num, "phase": _num,
    },
    "additionalProperties": False,
}
_coef = {"oneOf": [_num, _vector, _closed_form]}

_kernel = {
    "oneOf": [
        {
            "type": "object",
            "required": ["form", "value"],
            "properties": {"form": {"const": "constant"}, "value": _nonneg},
            "additionalProperties": False,
        },
        {
            "type": "object",
            "required": ["form", "C", "B"],
            "properties": {"form": {"const": "separable"}, "C": _coef, "B": _coef},
            "additionalProperties": False,
        },
        {
            "type": "object",
            "required": ["form", "table"],
            "properties": {
                "form": {"const": "tabulated"},
                "table": _matrix,
                "sup_norm_bound": _nonneg,
            },
            "additionalProperties": False,
        },
    ]
}

_nonlinearity = {
    "type": "object",
    "required": ["name"],
    "properties": {
        "name": {"enum": ["linear", "scale", "sin", "exp", "poly"]},
        "params": {"type": "object"},
    },
    "additionalProperties": False,
}


def _data(required, props):
    return {"type": "object", "required": required, "properties": props, "additionalProperties": False}


DATA_SCHEMAS = {
    "classic": _data(["A", "B"], {"A": _num, "B": _nonneg}),
    "varcoef": _data(["A", "B", "C"], {"A": _coef, "B": _coef, "C": _coef}),
    "kernel": _data(["kernel", "A"], {"kernel": _kernel, "A": _coef}),
    "matrix": _data(["K", "A", "B"], {"K": _matrix, "A": _vector, "B": _nonneg}),
    "discrete": _data(["A", "B"], {
        "A": _vector,
        "B": {"type": "array", "items": _nonneg},
        "C": {"type": "array", "items": _nonneg, "minItems": 1},
    }),
    "maxprin": _data(["B"], {
        "B": _nonneg,
        "x": {"oneOf": [_vector, {"const": "first_eigenvector"}]},
        "boundary": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
        "enforce_admissibility": {"type": "boolean"},
    }),
    "semilinear": _data(["nonlinearity", "C"], {
        "nonlinearity": _nonlinearity,
        "C": _nonneg,
        "x_init": _num,
        "x0_hat": _num,
        "rule": {"enum": ["left", "lagged_trapezoid"]},
        "K": _matrix,
        "x0": _vector,
    }),
    "resolvent": _data(["K", "s", "A"], {"K": _matrix, "s": _num, "A": _vector}),
}

_options = {
    "type": "object",
    "properties": {
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "tail_tol": {"type": "number", "exclusiveMinimum": 0},
        "max_terms": {"type": "integer", "minimum": 1},
        "max_iter": {"type": "integer", "minimum": 1},
        "steps": {"type": "integer", "minimum": 2},
        "laplace_tol": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}

SPEC_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "gronwall problem spec",
    "type": "object",
    "required": ["kind", "data"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "grid": {
            "type": "object",
            "required": ["n"],
            "properties": {"a": _num, "b": _num, "n": {"type": "integer", "minimum": 2}},
            "additionalProperties": False,
        },
        "data": {"type": "object"},
        "options": _options,
    },
    "additionalProperties": False,
    "allOf": [
        {
            "if": {"properties": {"kind": {"const": kind}}},
            "then": {"properties": {"data": schema}},
        }
        for kind, schema in DATA_SCHEMAS.items()
    ]
    + [
        {
            "if": {"properties": {"kind": {"enum": ["classic", "varcoef", "kernel", "maxprin"]}}},
            "then": {"required": ["grid"]},
        },
        {
            "if": {
                "properties": {
                    "kind": {"const": "semilinear"},
                    "data": {"not": {"required": ["K"]}},
                }
            },
            "then": {"required": ["grid"], "properties": {"data": {"required": ["x_init"]}}},
        },
        {
            "if": {
                "properties": {"kind": {"const": "semilinear"}, "data": {"required": ["K"]}}
            },
            "then": {"properties": {"data": {"required": ["x0"]}}},
        },
    ],
}

_comparison = {
    "type": "object",
    "required": ["name", "max_abs_gap", "tolerance", "pass"],
    "properties": {
        "name": {"type": "string"},
        "max_abs_gap": _nonneg,
        "tolerance": _nonneg,
        "pass": {"type": "boolean"},
    },
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "gronwall report",
    "type": "object",
    "required": ["spec_echo", "results", "oracle_comparisons", "passed", "payload_digest", "timing_ms"],
    "properties": {
        "spec_echo": {
            "type": "object",
            "required": ["kind", "digest"],
            "properties": {
                "kind": {"enum": list(KINDS)},
                "digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
            },
            "additionalProperties": False,
        },
        "results": {"type": "object"},
        "oracle_comparisons": {"type": "array", "items": _comparison},
        "passed": {"type": "boolean"},
        "payload_digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "timing_ms": _nonneg,
    },
    "additionalProperties": False,
}


def coefficient(value, grid):
    """Node values of a coefficient given in any of the accepted spec forms."""
    if isinstance(value, dict):
        u = grid.nodes - grid.a
        form = value["form"]
        g = value.get
        if form == "constant":
            return np.full(grid.n, float(g("value", 0.0)))
        if form == "linear":
            return g("c0", 0.0) + g("c1", 0.0) * u
        if form == "exp":
            return g("c", 1.0) * np.exp(g("rate", 0.0) * u)
        if form == "sin":
            return g("c0", 0.0) + g("amp", 1.0) * np.sin(g("omega", 1.0) * u + g("phase", 0.0))
        raise ParameterError(f"unknown coefficient form {form!r}")
    if isinstance(value, (list, tuple)):
        if len(value) != grid.n:
            raise ParameterError(f"coefficient table has {len(value)} values, grid has {grid.n}")
        return np.array(value, dtype=float)
    return np.full(grid.n, float(value))

"""JSON Schemas (draft 2020-12) of the command-line reports, version 1.

The schemas are plain dictionaries so the package itself does not depend on
a validator; any JSON Schema implementation can check a report against
``schema_for(report["command"])``.
"""

from __future__ import annotations

import copy

__all__ = ["SCHEMA_VERSION", "schema_for", "COMMAND_SCHEMAS"]

SCHEMA_VERSION = 1

_STR_OR_NULL = {"type": ["string", "null"]}
_INT_OR_NULL = {"type": ["integer", "null"]}
_NUM_OR_NULL = {"type": ["number", "null"]}
_CNUM = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

_ERROR = {
    "type": "object",
    "required": ["type", "message"],
    "properties": {
        "type": {"type": "string"},
        "message": {"type": "string"},
        "line": {"type": "integer"},
        "column": {"type": "integer"},
    },
}

_NODE = {
    "type": "object",
    "required": ["id", "parent", "depth", "chart", "center", "class", "dicritical", "field", "children"],
    "properties": {
        "id": {"type": "integer"},
        "parent": _INT_OR_NULL,
        "depth": {"type": "integer", "minimum": 0},
        "chart": {"enum": ["root", "chart_t", "chart_s"]},
        "center": {"type": "string"},
        "orbit_factor": {"type": "string"},
        "orbit_degree": {"type": "integer", "minimum": 1},
        "conjugates": {"type": "integer", "minimum": 1},
        "class": {"type": "string"},
        "eigenvalues": {"type": ["array", "null"], "items": {"type": "string"}},
        "order": _INT_OR_NULL,
        "dicritical": {"type": "boolean"},
        "axes": {"type": "array"},
        "field": {"type": "string"},
        "locus": {"type": "string"},
        "corner": {"type": "boolean"},
        "children": {"type": "array", "items": {"type": "integer"}},
        "restriction_check": {"type": ["boolean", "null"]},
    },
}

_TREE = {
    "type": "object",
    "required": ["max_depth", "depth", "nodes"],
    "properties": {
        "max_depth": {"type": "integer"},
        "depth": {"type": "integer"},
        "nodes": {"type": "array", "items": _NODE, "minItems": 1},
    },
}

_VERDICT = {"enum": ["FixedCurve", "SeparatrixCase", "PureDomainCase", "AbateCurves", "AbateDomains"]}

_CLAIMS = {
    "type": "object",
    "required": ["fixed_curve", "parabolic_curve", "parabolic_domains", "foliated", "asymptotic_to_separatrix"],
    "properties": {
        k: {"type": "boolean"}
        for k in ("fixed_curve", "parabolic_curve", "parabolic_domains", "foliated", "asymptotic_to_separatrix")
    },
    "additionalProperties": False,
}

_SHAPE = {
    "type": ["object", "null"],
    "required": ["r", "m", "a", "b", "c", "p", "leaf", "swapped", "domains"],
    "properties": {
        "r": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 0},
        "a": {"type": "string"},
        "b": {"type": "string"},
        "c": {"type": "string"},
        "p": {"type": "integer", "minimum": 1},
        "leaf": _INT_OR_NULL,
        "swapped": {"type": "boolean"},
        "domains": {"type": "integer", "minimum": 1},
    },
}

_REPORT = {
    "type": "object",
    "required": ["schema", "mode", "input", "verdict", "statement", "claims", "counts", "evidence", "shape", "indices", "certificate", "notes"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "mode": {"enum": ["direction", "abate", "divisor"]},
        "input": {
            "type": "object",
            "required": ["map", "direction", "k", "generator_order"],
            "properties": {
                "map": {"type": "string"},
                "direction": _STR_OR_NULL,
                "k": {"type": "integer", "minimum": 1},
                "generator_order": _INT_OR_NULL,
            },
        },
        "verdict": _VERDICT,
        "statement": {"type": "string"},
        "claims": _CLAIMS,
        "counts": {
            "type": "object",
            "required": ["guaranteed", "model_domains"],
            "properties": {"guaranteed": {"type": "integer", "minimum": 1}, "model_domains": _INT_OR_NULL},
        },
        "evidence": {"type": "object"},
        "shape": _SHAPE,
        "indices": {"type": "array", "items": {"type": "object", "required": ["node", "separatrix", "index"]}},
        "certificate": {"type": "array", "items": {"type": "object"}},
        "notes": {"type": "array", "items": {"type": "string"}},
        "tree": _TREE,
    },
    # foliation is only ever claimed together with domains
    "if": {"properties": {"verdict": {"enum": ["SeparatrixCase", "AbateCurves", "FixedCurve"]}}},
    "then": {"properties": {"claims": {"properties": {"foliated": {"const": False}}}}},
}

_REPORT_OR_ERROR = {
    "oneOf": [
        _REPORT,
        {
            "type": "object",
            "required": ["direction", "error"],
            "properties": {"direction": {"type": "string"}, "error": _ERROR},
            "additionalProperties": False,
        },
    ]
}

_BODIES = {
    "log": {
        "required": ["order", "generator"],
        "properties": {
            "order": {"type": "integer", "minimum": 1},
            "generator": {
                "type": "object",
                "required": ["dx", "dy"],
                "properties": {"dx": {"type": "string"}, "dy": {"type": "string"}},
            },
        },
    },
    "chardirs": {
        "required": ["directions", "count"],
        "properties": {
            "count": {"type": "integer", "minimum": 0},
            "directions": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["direction", "multiplicity", "degenerate", "conjugates", "factor"],
                    "properties": {
                        "direction": {"type": "string"},
                        "multiplicity": {"type": "integer", "minimum": 1},
                        "degenerate": {"type": "boolean"},
                        "conjugates": {"type": "integer", "minimum": 1},
                        "factor": {"type": "string"},
                    },
                },
            },
        },
    },
    "resolve": {
        "required": ["generator_order", "tree", "leaves", "leaves_reduced", "restriction_checks", "dot"],
        "properties": {
            "generator_order": _INT_OR_NULL,
            "tree": _TREE,
            "leaves": {"type": "array", "items": {"type": "integer"}},
            "leaves_reduced": {"type": "boolean"},
            "restriction_checks": {"type": ["boolean", "null"]},
            "dot": _STR_OR_NULL,
        },
    },
    "index": {
        "required": ["generator_order", "divisor_indices", "divisor_sum", "validation", "dot"],
        "properties": {
            "generator_order": _INT_OR_NULL,
            "divisor_indices": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["center", "factor", "conjugates", "index", "orbit_sum", "node"],
                    "properties": {
                        "center": {"type": "string"},
                        "factor": {"type": "string"},
                        "conjugates": {"type": "integer", "minimum": 1},
                        "index": {"type": "string"},
                        "orbit_sum": {"type": "string"},
                        "node": _INT_OR_NULL,
                    },
                },
            },
            "divisor_sum": _STR_OR_NULL,
            "validation": {
                "type": "object",
                "required": ["ok", "checks"],
                "properties": {
                    "ok": {"type": "boolean"},
                    "checks": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["check", "ok", "detail", "node"],
                            "properties": {"check": {"type": "string"}, "ok": {"type": "boolean"}, "detail": {"type": "string"}, "node": _INT_OR_NULL},
                        },
                    },
                },
            },
            "dot": _STR_OR_NULL,
        },
    },
    "classify": {
        "required": ["reports"],
        "properties": {"reports": {"type": "array", "items": _REPORT_OR_ERROR}},
    },
    "orbit": {
        "required": ["start", "steps", "escaped", "final", "final_norm", "bindings", "csv", "tangent", "nearest_characteristic", "iterated_tangents", "convergence_error"],
        "properties": {
            "start": {"type": "array", "items": _CNUM, "minItems": 2, "maxItems": 2},
            "steps": {"type": "integer", "minimum": 0},
            "escaped": {"type": "boolean"},
            "final": {"type": "array", "items": _CNUM, "minItems": 2, "maxItems": 2},
            "final_norm": {"type": "number"},
            "bindings": {"type": "object", "additionalProperties": {"type": "number"}},
            "csv": _STR_OR_NULL,
            "tangent": {
                "type": ["object", "null"],
                "required": ["direction", "residual"],
                "properties": {"direction": {"type": "array", "items": _CNUM}, "residual": {"type": "number"}},
            },
            "nearest_characteristic": {
                "type": ["object", "null"],
                "required": ["direction", "distance"],
                "properties": {"direction": {"type": "string"}, "distance": {"type": "number"}},
            },
            "iterated_tangents": {
                "type": ["array", "null"],
                "items": {
                    "type": "object",
                    "required": ["level", "chart", "coordinate", "residual"],
                    "properties": {"level": {"type": "integer"}, "chart": {"enum": ["chart_t", "chart_s"]}, "coordinate": _CNUM, "residual": {"type": "number"}},
                },
            },
            "convergence_error": _STR_OR_NULL,
        },
    },
    "vivas": {
        "required": ["vivas"],
        "properties": {
            "vivas": {
                "type": "object",
                "required": ["domain", "requested", "sampled", "N", "empty", "invariance_fraction", "passed"],
                "properties": {
                    "domain": {"type": "object", "required": ["eps", "delta", "eta", "M", "r", "m", "p"]},
                    "requested": {"type": "integer"},
                    "sampled": {"type": "integer"},
                    "N": {"type": "integer"},
                    "empty": {"type": "boolean"},
                    "invariance_fraction": _NUM_OR_NULL,
                    "min_image_margin": {"type": "number"},
                    "arg_drift_fraction": {"type": "number"},
                    "exponent": {
                        "type": "object",
                        "required": ["slope", "n0", "C", "holds_after_n0"],
                        "properties": {"slope": _NUM_OR_NULL, "n0": _INT_OR_NULL, "C": _NUM_OR_NULL, "holds_after_n0": {"type": "boolean"}},
                    },
                    "passed": {"type": "boolean"},
                },
            }
        },
    },
}
_BODIES["abate"] = _BODIES["classify"]


def _envelope(command: str, body: dict) -> dict:
    ok = {
        "type": "object",
        "required": ["schema", "command", "input"] + body["required"],
        "properties": {
            "schema": {"const": SCHEMA_VERSION},
            "command": {"const": command},
            "input": {"type": "string"},
            **body["properties"],
        },
        "additionalProperties": False,
    }
    err = {
        "type": "object",
        "required": ["schema", "command", "input", "error"],
        "properties": {
            "schema": {"const": SCHEMA_VERSION},
            "command": {"const": command},
            "input": {"type": "string"},
            "error": _ERROR,
        },
        "additionalProperties": False,
    }
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": f"tidgerm {command} report",
        "oneOf": [ok, err],
    }


COMMAND_SCHEMAS = {cmd: _envelope(cmd, body) for cmd, body in _BODIES.items()}


def schema_for(command: str) -> dict:
    """A deep copy of the JSON Schema of ``command``'s report."""
    return copy.deepcopy(COMMAND_SCHEMAS[command])

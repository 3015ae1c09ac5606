"""Built-in instance documents for the worked examples used by the test and acceptance suites."""

from __future__ import annotations

import copy

SCHEMA_VERSION = 1


def _identity_op(n: int, name: str = "Id") -> dict:
    return {"name": name, "arity": 1, "table": list(range(n))}


def _translations(n: int) -> list[dict]:
    return [{"name": f"+{k}", "arity": 1, "table": [(x + k) % n for x in range(n)]}
            for k in range(n)]


def _identity_only(labels: list, name: str) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "carrier": labels,
        "operations": [_identity_op(len(labels))],
        "system": {"tier": "UNARY", "explicit": ["Id"]},
    }


def _example_2_1_4() -> dict:
    doc = _identity_only([0, 1], "example-2-1-4")
    doc["base"] = []
    return doc


def _example_3_3_3() -> dict:
    doc = _identity_only(["a", "b"], "example-3-3-3")
    doc["base"] = []
    # every self-map of {a, b}, listed as the images of a and b
    doc["morphisms"] = {"id": ["a", "b"], "const_a": ["a", "a"], "const_b": ["b", "b"],
                        "swap": ["b", "a"]}
    doc["morphism_sets"] = {"M1": ["id", "const_a"], "M2": ["id", "const_b"]}
    doc["morphism_kind"] = "monoid"
    return doc


def _example_3_3_6() -> dict:
    doc = _identity_only([1, 2, 3, 4], "example-3-3-6")
    doc["base"] = []
    doc["morphisms"] = {"id": [1, 2, 3, 4], "t12": [2, 1, 3, 4], "t34": [1, 2, 4, 3]}
    doc["morphism_sets"] = {"G1": ["id", "t12"], "G2": ["id", "t34"]}
    doc["morphism_kind"] = "group"
    doc["subsets"] = {"K": [1, 2]}
    doc["restriction"] = {"base": [1, 2], "subset": "K"}
    return doc


def _sierpinski() -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": "sierpinski-powerset",
        "topology": {"points": ["a", "b"], "opens": [[], ["b"], ["a", "b"]]},
    }


def _mod3() -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": "mod3",
        "carrier": [0, 1, 2],
        "operations": _translations(3),
        "system": {"tier": "UNARY", "explicit": ["+0", "+1", "+2"]},
        "base": [],
        "subsets": {"K": [0]},
        "solutions": [1],
        "transcendental": {"ops": ["+0", "+1", "+2"], "subset": [0]},
    }


def _mod4() -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": "mod4-parity",
        "carrier": [0, 1, 2, 3],
        "operations": _translations(4),
        "system": {"tier": "UNARY", "explicit": ["+0", "+1", "+2", "+3"]},
        "base": [],
        "target": {
            "carrier": [0, 1],
            "operations": _translations(2),
            "system": {"tier": "UNARY", "explicit": ["+0", "+1"]},
        },
        "phi": [0, 1, 0, 1],
        "theta": [["+0", "+0"], ["+1", "+1"], ["+2", "+0"], ["+3", "+1"]],
    }


def _cap3() -> dict:
    table = [x + y if x + y <= 3 else None for x in range(4) for y in range(4)]
    return {
        "schema_version": SCHEMA_VERSION,
        "name": "cap3-addition",
        "carrier": [0, 1, 2, 3],
        "operations": [_identity_op(4), {"name": "add", "arity": 2, "table": table}],
        "system": {"tier": "PARTIAL_GENERALIZED", "generators": ["Id", "add"], "arity_cap": 2},
        "space": [1, 2, 3],
        "base": [],
        "solutions": [1],
        "chain": [
            {"solutions": [1], "ops": ["Id"], "recorded": [1]},
            {"solutions": [1], "ops": ["Id", "add"], "recorded": [1, 2, 3]},
        ],
    }


def _two_element_action() -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": "two-element-action",
        "action": {"elements": ["e", "m"], "mult": [[0, 1], [1, 1]], "identity": 0,
                   "phase": [0, 1], "action": [[0, 1], [0, 0]]},
        "base": [],
    }


_BUILDERS = {
    "example-2-1-4": _example_2_1_4,
    "example-3-3-3": _example_3_3_3,
    "example-3-3-6": _example_3_3_6,
    "sierpinski-powerset": _sierpinski,
    "mod3": _mod3,
    "mod4-parity": _mod4,
    "cap3-addition": _cap3,
    "two-element-action": _two_element_action,
}

FIXTURE_NAMES = tuple(_BUILDERS)


def fixture(name: str) -> dict:
    return copy.deepcopy(_BUILDERS[name]())


def all_fixtures() -> dict:
    return {n: fixture(n) for n in FIXTURE_NAMES}

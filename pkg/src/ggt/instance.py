"""Instance documents: schema, loading and resolution into in-memory objects."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import jsonschema

from .carrier import (Carrier, OperationSystem, PartialOperation, Representation, Tier,
                      UsageError, generate_closure)
from .dynsys import MonoidAction, action_to_system
from .fixtures import FIXTURE_NAMES, SCHEMA_VERSION, fixture
from .morphism import Morphism, ThetaRelation
from .topology import FiniteTopology
from .topospace import FiniteTopoSpace, powerset_system


class ParseError(UsageError):
    pass


class SchemaError(UsageError):
    pass


class ReferenceError_(UsageError):
    """A name or label that does not resolve."""


_LABEL = {"type": ["string", "integer"]}
_LABELS = {"type": "array", "items": _LABEL}
_OP = {
    "type": "object",
    "required": ["name", "arity", "table"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "arity": {"type": "integer", "minimum": 1},
        "table": {"type": "array", "items": {"type": ["integer", "null"], "minimum": 0}},
    },
}
_SYSTEM = {
    "type": "object",
    "required": ["tier"],
    "additionalProperties": False,
    "properties": {
        "tier": {"enum": ["UNARY", "GENERALIZED", "PARTIAL_GENERALIZED"]},
        "explicit": {"type": "array", "items": {"type": "string"}},
        "generators": {"type": "array", "items": {"type": "string"}},
        "arity_cap": {"type": "integer", "minimum": 1},
    },
    "oneOf": [{"required": ["explicit"]}, {"required": ["generators"]}],
}
_ALGEBRA = {
    "type": "object",
    "required": ["carrier", "operations", "system"],
    "properties": {
        "carrier": _LABELS,
        "operations": {"type": "array", "items": _OP},
        "system": _SYSTEM,
    },
}

SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["schema_version"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "carrier": _LABELS,
        "operations": {"type": "array", "items": _OP},
        "system": _SYSTEM,
        "space": _LABELS,
        "base": _LABELS,
        "subsets": {"type": "object", "additionalProperties": _LABELS},
        "morphisms": {"type": "object", "additionalProperties": _LABELS},
        "morphism_sets": {"type": "object",
                          "additionalProperties": {"type": "array", "items": {"type": "string"}}},
        "morphism_kind": {"enum": ["monoid", "group"]},
        "topology": {
            "type": "object",
            "required": ["points", "opens"],
            "additionalProperties": False,
            "properties": {"points": _LABELS, "opens": {"type": "array", "items": _LABELS}},
        },
        "action": {
            "type": "object",
            "required": ["elements", "mult", "identity", "phase", "action"],
            "additionalProperties": False,
            "properties": {
                "elements": _LABELS,
                "mult": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                "identity": {"type": "integer", "minimum": 0},
                "phase": _LABELS,
                "action": {"type": "array",
                           "items": {"type": "array", "items": {"type": "integer"}}},
            },
        },
        "target": _ALGEBRA,
        "phi": _LABELS,
        "theta": {"type": "array", "items": {"type": "array", "items": {"type": "string"},
                                             "minItems": 2, "maxItems": 2}},
        "solutions": _LABELS,
        "chain": {"type": "array", "items": {
            "type": "object",
            "required": ["solutions", "ops"],
            "additionalProperties": False,
            "properties": {"solutions": _LABELS, "ops": {"type": "array", "items": {"type": "string"}},
                           "recorded": {"type": ["array", "null"], "items": _LABEL}},
        }},
        "transcendental": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"ops": {"type": "array", "items": {"type": "string"}},
                           "subset": _LABELS},
        },
        "restriction": {
            "type": "object",
            "required": ["base", "subset"],
            "additionalProperties": False,
            "properties": {"base": _LABELS, "subset": {"type": "string"}},
        },
    },
    "dependencies": {
        "operations": ["carrier", "system"],
        "system": ["carrier", "operations"],
        "phi": ["target", "theta"],
        "theta": ["target", "phi"],
    },
}


@dataclass
class Instance:
    name: str
    doc: dict
    system: OperationSystem
    labels: tuple
    S: frozenset
    B: frozenset
    ops_by_name: dict
    subsets: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    morphism_sets: dict = field(default_factory=dict)
    morphism_kind: str | None = None
    topospace: FiniteTopoSpace | None = None
    action: MonoidAction | None = None
    target: OperationSystem | None = None
    phi: Morphism | None = None
    theta: ThetaRelation | None = None
    solutions: frozenset | None = None
    chain: list = field(default_factory=list)
    transcendental: dict | None = None
    restriction: dict | None = None

    def label(self, i: int):
        return self.labels[i]

    def labels_of(self, xs) -> list:
        return [self.labels[i] for i in sorted(xs)]


def read_document(path: str) -> tuple[str, dict]:
    """Load from a file, or from a built-in fixture name (``fixtures/NAME`` also accepted)."""
    if os.path.exists(path):
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError(str(e)) from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
        return path, doc
    name = os.path.basename(path)
    if name.endswith(".json"):
        name = name[:-5]
    if name in FIXTURE_NAMES:
        return name, fixture(name)
    raise UsageError(f"no such instance file or built-in fixture: {path}")


def validate_document(doc) -> None:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise SchemaError(f"schema violation at {where}: {e.message}") from None
    if not any(k in doc for k in ("operations", "topology", "action")):
        raise SchemaError("instance needs operations, a topology or an action")


def _index(carrier: Carrier, label, what: str) -> int:
    try:
        return carrier.idx(label)
    except (KeyError, UsageError):
        raise ReferenceError_(f"{what}: unknown element {label!r}") from None


def _build_algebra(doc: dict, prefix: str = "") -> tuple[OperationSystem, dict, Carrier]:
    labels = doc["carrier"]
    if len(set(map(repr, labels))) != len(labels):
        raise SchemaError(f"{prefix}carrier labels repeat")
    carrier = Carrier(tuple(labels))
    n = carrier.n
    ops = {}
    for o in doc["operations"]:
        if o["name"] in ops:
            raise SchemaError(f"{prefix}operation {o['name']} defined twice")
        if len(o["table"]) != n ** o["arity"]:
            raise SchemaError(f"{prefix}operation {o['name']}: table has {len(o['table'])} rows, "
                              f"expected {n ** o['arity']}")
        bad = [v for v in o["table"] if v is not None and v >= n]
        if bad:
            raise SchemaError(f"{prefix}operation {o['name']}: value {bad[0]} outside the carrier")
        ops[o["name"]] = PartialOperation(o["name"], o["arity"], n, tuple(o["table"]))
    sys_doc = doc["system"]
    tier = Tier[sys_doc["tier"]]

    def resolve(names):
        out = []
        for nm in names:
            if nm not in ops:
                raise ReferenceError_(f"{prefix}system refers to unknown operation {nm!r}")
            out.append(ops[nm])
        return out

    if "explicit" in sys_doc:
        system = OperationSystem(carrier, tier, tuple(resolve(sys_doc["explicit"])), name=doc.get("name", ""))
    else:
        gens = resolve(sys_doc["generators"])
        if tier is Tier.UNARY:
            system = generate_closure(carrier, gens, tier)
        elif "arity_cap" in sys_doc:
            system = generate_closure(carrier, gens, tier, sys_doc["arity_cap"])
        else:
            system = OperationSystem(carrier, tier, tuple(gens), Representation.GENERATED)
    return system, ops, carrier


def resolve(name: str, doc: dict) -> Instance:
    validate_document(doc)
    topo = action = None
    if "operations" in doc:
        system, ops, carrier = _build_algebra(doc)
        S_default = frozenset(range(carrier.n))
    elif "topology" in doc:
        pts = doc["topology"]["points"]
        pos = {repr(p): i for i, p in enumerate(pts)}
        opens = []
        for o in doc["topology"]["opens"]:
            m = 0
            for x in o:
                if repr(x) not in pos:
                    raise ReferenceError_(f"topology: unknown point {x!r}")
                m |= 1 << pos[repr(x)]
            opens.append(m)
        full = (1 << len(pts)) - 1
        opens_set = set(opens)
        if 0 not in opens_set or full not in opens_set or any(
                (a | b) not in opens_set or (a & b) not in opens_set
                for a in opens_set for b in opens_set):
            raise SchemaError("topology: open sets are not closed under unions and intersections")
        topo = FiniteTopoSpace(tuple(pts), FiniteTopology(tuple(range(len(pts))),
                                                           tuple(sorted(opens_set))))
        system = powerset_system(topo, budget=6)
        carrier = system.carrier
        ops = {f.name: f for f in system.ops}
        S_default = frozenset(range(carrier.n))
    else:
        a = doc["action"]
        try:
            action = MonoidAction(tuple(a["elements"]), a["mult"], a["identity"],
                                  Carrier(tuple(a["phase"])), a["action"])
        except (UsageError, IndexError, TypeError) as e:
            raise SchemaError(f"action: {e}") from None
        system, sp = action_to_system(action)
        carrier = system.carrier
        ops = {f.name: f for f in system.ops}
        S_default = sp.elements

    def idx_set(labels, what):
        return frozenset(_index(carrier, x, what) for x in labels)

    S = idx_set(doc["space"], "space") if "space" in doc else S_default
    B = idx_set(doc.get("base", []), "base")
    if not B <= S:
        raise ReferenceError_("base is not inside the space")
    inst = Instance(name, doc, system, carrier.elements, S, B, ops, topospace=topo, action=action)
    inst.subsets = {k: idx_set(v, f"subset {k}") for k, v in doc.get("subsets", {}).items()}
    pts = sorted(S)
    for k, vals in doc.get("morphisms", {}).items():
        if len(vals) != len(pts):
            raise SchemaError(f"morphism {k}: expected {len(pts)} images")
        inst.morphisms[k] = Morphism(tuple(pts), tuple(_index(carrier, v, f"morphism {k}")
                                                       for v in vals))
    for k, names in doc.get("morphism_sets", {}).items():
        for nm in names:
            if nm not in inst.morphisms:
                raise ReferenceError_(f"morphism set {k}: unknown morphism {nm!r}")
        inst.morphism_sets[k] = frozenset(inst.morphisms[nm] for nm in names)
    inst.morphism_kind = doc.get("morphism_kind")
    if "target" in doc:
        tsys, tops, tcar = _build_algebra(doc["target"], "target: ")
        inst.target = tsys
        if len(doc["phi"]) != len(pts):
            raise SchemaError(f"phi: expected {len(pts)} images")
        inst.phi = Morphism(tuple(pts), tuple(_index(tcar, v, "phi") for v in doc["phi"]))
        pairs = []
        for f, g in doc["theta"]:
            if f not in ops:
                raise ReferenceError_(f"theta: unknown source operation {f!r}")
            if g not in tops:
                raise ReferenceError_(f"theta: unknown target operation {g!r}")
            pairs.append((ops[f], tops[g]))
        inst.theta = ThetaRelation(tuple(pairs))
    if "solutions" in doc:
        inst.solutions = idx_set(doc["solutions"], "solutions")
    for i, step in enumerate(doc.get("chain", [])):
        for nm in step["ops"]:
            if nm not in ops:
                raise ReferenceError_(f"chain step {i}: unknown operation {nm!r}")
        gens = [ops[nm] for nm in step["ops"]]
        if all(g.arity == 1 and g.is_total for g in gens):
            ssys = generate_closure(carrier, gens, Tier.UNARY)
        else:
            ssys = generate_closure(carrier, gens, system.tier)
        rec = step.get("recorded")
        inst.chain.append((idx_set(step["solutions"], f"chain step {i}"), ssys,
                           None if rec is None else idx_set(rec, f"chain step {i}")))
    if "transcendental" in doc:
        t = doc["transcendental"]
        names = t.get("ops", list(ops))
        for nm in names:
            if nm not in ops:
                raise ReferenceError_(f"transcendental: unknown operation {nm!r}")
        inst.transcendental = {"ops": [ops[nm] for nm in names],
                               "subset": idx_set(t["subset"], "transcendental")
                               if "subset" in t else S}
    if "restriction" in doc:
        r = doc["restriction"]
        if r["subset"] not in inst.subsets:
            raise ReferenceError_(f"restriction: unknown subset {r['subset']!r}")
        inst.restriction = {"base": idx_set(r["base"], "restriction"),
                            "subset": inst.subsets[r["subset"]]}
    return inst


def load_instance(path: str) -> Instance:
    name, doc = read_document(path)
    return resolve(doc.get("name", name) if isinstance(doc, dict) else name, doc)

"""Finite carriers, partial operation tables and operation systems.

Everything in the package works at the index level: a carrier of size n is
identified with ``range(n)`` and its labels are only used for display and
serialization.  Operation tables are stored row-major as flat tuples whose
entries are carrier indices or the ``UNDEFINED`` sentinel.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Hashable, Iterable, Sequence


class _Sentinel:
    __slots__ = ("_name",)

    def __init__(self, name: str):
        self._name = name

    def __repr__(self) -> str:
        return self._name

    def __reduce__(self):
        return self._name

    def __bool__(self) -> bool:
        return False


UNDEFINED = _Sentinel("UNDEFINED")
ILL_DEFINED = _Sentinel("ILL_DEFINED")
INDETERMINATE = _Sentinel("INDETERMINATE")
NOT_APPLICABLE = _Sentinel("NOT_APPLICABLE")


class UsageError(ValueError):
    """Malformed input: wrong arity, foreign element, bad cap."""


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed a configured size cap."""

    def __init__(self, what: str, limit: int, actual: int):
        super().__init__(f"{what}: size {actual} exceeds budget {limit}")
        self.what = what
        self.limit = limit
        self.actual = actual


class Tier(Enum):
    UNARY = "unary"
    GENERALIZED = "generalized"
    PARTIAL_GENERALIZED = "partial_generalized"


class Representation(Enum):
    EXPLICIT = "explicit"
    GENERATED = "generated"


# ---------------------------------------------------------------- carrier


@dataclass(frozen=True)
class Carrier:
    elements: tuple

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if len(set(self.elements)) != len(self.elements):
            raise UsageError("carrier labels must be unique")

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> dict:
        return {label: i for i, label in enumerate(self.elements)}

    def idx(self, label: Hashable) -> int:
        try:
            return self.elements.index(label)
        except ValueError:
            raise UsageError(f"{label!r} is not a carrier element") from None

    def label(self, i: int):
        return self.elements[i]

    @classmethod
    def of_size(cls, n: int) -> "Carrier":
        return cls(tuple(range(n)))


def tuple_index(args: Sequence[int], n: int) -> int:
    k = 0
    for a in args:
        k = k * n + a
    return k


def all_tuples(points: Iterable[int], arity: int):
    """Tuples over ``points`` in lexicographic (row-major) order."""
    return itertools.product(sorted(points), repeat=arity)


# -------------------------------------------------------------- operations


@dataclass(frozen=True, eq=False)
class PartialOperation:
    name: str
    arity: int
    size: int
    table: tuple

    def __post_init__(self):
        if self.arity < 1:
            raise UsageError("arity must be positive")
        table = tuple(UNDEFINED if v is None else v for v in self.table)
        if len(table) != self.size ** self.arity:
            raise UsageError(
                f"{self.name}: table has {len(table)} entries, expected {self.size ** self.arity}")
        for v in table:
            if v is not UNDEFINED and not (isinstance(v, int) and 0 <= v < self.size):
                raise UsageError(f"{self.name}: entry {v!r} is not a carrier index")
        object.__setattr__(self, "table", table)

    # extensional identity: names are metadata only
    def _key(self):
        return (self.arity, self.size, self.table)

    def __eq__(self, other):
        return isinstance(other, PartialOperation) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __call__(self, *args: int):
        return self.table[tuple_index(args, self.size)]

    @property
    def is_total(self) -> bool:
        return UNDEFINED not in self.table

    def domain(self) -> list[tuple]:
        return [t for t in itertools.product(range(self.size), repeat=self.arity)
                if self.table[tuple_index(t, self.size)] is not UNDEFINED]

    def renamed(self, name: str) -> "PartialOperation":
        return PartialOperation(name, self.arity, self.size, self.table)

    @classmethod
    def from_function(cls, name: str, size: int, arity: int,
                      fn: Callable[..., int | None]) -> "PartialOperation":
        table = []
        for t in itertools.product(range(size), repeat=arity):
            v = fn(*t)
            table.append(UNDEFINED if v is None or v is UNDEFINED else v)
        return cls(name, arity, size, tuple(table))

    @classmethod
    def identity(cls, size: int) -> "PartialOperation":
        return cls("id", 1, size, tuple(range(size)))

    @classmethod
    def constant(cls, size: int, c: int) -> "PartialOperation":
        return cls(f"const{c}", 1, size, (c,) * size)


def identity(size: int) -> PartialOperation:
    return PartialOperation.identity(size)


def apply(f: PartialOperation, args: Sequence[int]):
    if len(args) != f.arity:
        raise UsageError(f"{f.name} expects {f.arity} arguments, got {len(args)}")
    for a in args:
        if not (isinstance(a, int) and 0 <= a < f.size):
            raise UsageError(f"{a!r} is not an element of the carrier")
    return f(*args)


def compose(f: PartialOperation, gs: Sequence[PartialOperation]) -> PartialOperation:
    """f(g1(v1), ..., gk(vk)) with argument blocks laid out in order."""
    if len(gs) != f.arity:
        raise UsageError(f"{f.name} has arity {f.arity}, got {len(gs)} inner operations")
    n = f.size
    if any(g.size != n for g in gs):
        raise UsageError("operations live on different carriers")
    name = f"{f.name}({','.join(g.name for g in gs)})"
    if f.arity == 1 and gs[0].arity == 1:
        g = gs[0].table
        ft = f.table
        return PartialOperation(name, 1, n, tuple(
            UNDEFINED if g[x] is UNDEFINED else ft[g[x]] for x in range(n)))
    offsets = []
    pos = 0
    for g in gs:
        offsets.append((pos, pos + g.arity))
        pos += g.arity
    table = []
    for t in itertools.product(range(n), repeat=pos):
        inner = []
        for g, (lo, hi) in zip(gs, offsets):
            v = g.table[tuple_index(t[lo:hi], n)]
            if v is UNDEFINED:
                break
            inner.append(v)
        else:
            table.append(f.table[tuple_index(inner, n)])
            continue
        table.append(UNDEFINED)
    return PartialOperation(name, pos, n, tuple(table))


def is_restriction(g: PartialOperation, f: PartialOperation) -> bool:
    if g.arity != f.arity or g.size != f.size:
        raise UsageError("restriction needs equal arity and carrier")
    return all(a is UNDEFINED or a == b for a, b in zip(g.table, f.table))


# ----------------------------------------------------------------- systems


@dataclass(frozen=True)
class OperationSystem:
    """A finite operation system over a carrier.

    ``ops`` holds the members of an EXPLICIT system or the generators of a
    GENERATED one.  Arity-capped slices produced by ``generate_closure`` keep
    their generators in ``generators`` so value-level algorithms can still
    work with the full (uncapped) closure.
    """

    carrier: Carrier
    tier: Tier
    ops: tuple
    representation: Representation = Representation.EXPLICIT
    arity_cap: int | None = None
    generators: tuple = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(self, "generators", tuple(self.generators))
        n = self.carrier.n
        for f in self.ops + self.generators:
            if f.size != n:
                raise UsageError(f"{f.name} is defined on a carrier of size {f.size}, not {n}")
            if self.tier is Tier.UNARY and f.arity != 1:
                raise UsageError(f"{f.name}: unary tier needs arity 1")
            if self.tier is not Tier.PARTIAL_GENERALIZED and not f.is_total:
                raise UsageError(f"{f.name}: only the partial tier allows undefined entries")

    @property
    def n(self) -> int:
        return self.carrier.n

    @property
    def is_generated(self) -> bool:
        return self.representation is Representation.GENERATED

    @property
    def members(self) -> tuple:
        if self.is_generated:
            raise UsageError("a generated system has no explicit member list")
        return self.ops

    @property
    def value_generators(self) -> tuple | None:
        """Generators whose fixpoint reproduces the full closure, if known."""
        if self.is_generated:
            return self.ops
        if self.arity_cap is not None and self.generators:
            return self.generators
        return None

    @property
    def max_arity(self) -> int:
        return max((f.arity for f in self.ops), default=1)

    def has_identity(self) -> bool:
        idn = identity(self.n)
        if not self.is_generated:
            return idn in self.ops
        unary = [g for g in self.ops if g.arity == 1]
        return idn in _unary_closure(unary)

    def with_ops(self, ops, representation=None) -> "OperationSystem":
        return OperationSystem(self.carrier, self.tier, tuple(ops),
                               representation or self.representation, name=self.name)


def _unary_closure(gens: Sequence[PartialOperation]) -> list[PartialOperation]:
    out: list[PartialOperation] = []
    seen: set = set()
    for g in gens:
        if g not in seen:
            seen.add(g)
            out.append(g)
    frontier = list(out)
    while frontier:
        new = []
        for a in frontier:
            for b in list(out):
                for c in (compose(a, (b,)), compose(b, (a,))):
                    if c not in seen:
                        seen.add(c)
                        out.append(c)
                        new.append(c)
        frontier = new
    return out


def _inner_choices(members: Sequence[PartialOperation], k: int, budget: int):
    """All k-tuples of members whose arities sum to at most ``budget``."""
    if k == 0:
        yield ()
        return
    for g in members:
        if g.arity + (k - 1) > budget:
            continue
        for rest in _inner_choices(members, k - 1, budget - g.arity):
            yield (g,) + rest


def generate_closure(carrier: Carrier, generators: Sequence[PartialOperation], tier: Tier,
                     arity_cap: int | None = None) -> OperationSystem:
    gens = tuple(generators)
    if tier is Tier.UNARY:
        ops = _unary_closure(gens)
        return OperationSystem(carrier, tier, tuple(ops), generators=gens)
    top = max((g.arity for g in gens), default=1)
    cap = top if arity_cap is None else arity_cap
    if cap < top:
        raise UsageError(f"arity cap {cap} is below the largest generator arity {top}")
    out: list[PartialOperation] = []
    seen: set = set()
    for g in gens:
        if g not in seen:
            seen.add(g)
            out.append(g)
    changed = True
    while changed:
        changed = False
        for f in list(out):
            for gs in _inner_choices(list(out), f.arity, cap):
                c = compose(f, gs)
                if c not in seen:
                    seen.add(c)
                    out.append(c)
                    changed = True
    OperationSystem(carrier, tier, gens)  # tier invariants on the generators
    return OperationSystem(carrier, tier, tuple(out), arity_cap=cap, generators=gens)


@dataclass(frozen=True)
class ClosureReport:
    closed: bool
    violations: tuple = field(default=())
    arity_cap: int | None = None
    checked: int = 0


def validate_system(system: OperationSystem) -> ClosureReport:
    """Check that every composite of members is a member (or a restriction of one).

    For multi-arity tiers only composites up to the system's arity cap
    (default: the largest member arity) are examined; composites of larger
    arity cannot be members of a finite list.
    """
    members = list(system.members)
    partial = system.tier is Tier.PARTIAL_GENERALIZED
    table_set = set(members)

    def is_member(c: PartialOperation) -> bool:
        if c in table_set:
            return True
        return partial and any(m.arity == c.arity and is_restriction(c, m) for m in members)

    violations = []
    checked = 0
    if system.tier is Tier.UNARY:
        for i, f in enumerate(members):
            for j, g in enumerate(members):
                checked += 1
                if not is_member(compose(f, (g,))):
                    violations.append((i, (j,)))
        return ClosureReport(not violations, tuple(violations), None, checked)
    cap = system.arity_cap or system.max_arity
    pos = {id(m): i for i, m in enumerate(members)}
    for i, f in enumerate(members):
        for gs in _inner_choices(members, f.arity, cap):
            checked += 1
            if not is_member(compose(f, gs)):
                violations.append((i, tuple(pos[id(g)] for g in gs)))
    return ClosureReport(not violations, tuple(violations), cap, checked)


def minimal_generators(system: OperationSystem) -> tuple:
    """A generating subset of an explicit unary system (greedy, order-stable)."""
    if system.is_generated:
        return system.ops
    if system.tier is not Tier.UNARY:
        return system.value_generators or system.ops
    kept: list[PartialOperation] = []
    span: set = set()
    for f in system.members:
        if f not in span:
            kept.append(f)
            span = set(_unary_closure(kept))
    return tuple(kept)


# --------------------------------------------------------------- helpers


def translation(n: int, k: int) -> PartialOperation:
    return PartialOperation(f"+{k % n}", 1, n, tuple((x + k) % n for x in range(n)))


def cyclic_system(n: int) -> OperationSystem:
    """All translations of Z/n as an explicit unary system."""
    return OperationSystem(Carrier.of_size(n), Tier.UNARY,
                           tuple(translation(n, k) for k in range(n)), name=f"Z{n}")


def capped_addition(n: int, cap: int) -> PartialOperation:
    return PartialOperation.from_function(
        f"add<={cap}", n, 2, lambda x, y: x + y if x + y <= cap else None)

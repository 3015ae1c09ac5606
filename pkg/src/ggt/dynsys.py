"""Adapters between finite monoid actions and unary operation systems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .carrier import (Carrier, OperationSystem, PartialOperation, Tier, UsageError, compose,
                      generate_closure, identity, validate_system)
from .morphism import Morphism, is_t_morphism
from .tspace import TSpace, generate_space


@dataclass(frozen=True)
class MonoidAction:
    """A monoid (elements, ``mult[g][h]`` = index of g∘h, identity index) acting on a phase set.

    ``action[g][x]`` is the index of Φ_g(x) in ``phase``.
    """

    elements: tuple
    mult: tuple
    identity: int
    phase: Carrier
    action: tuple

    def __post_init__(self):
        m, n = len(self.elements), self.phase.n
        object.__setattr__(self, "mult", tuple(tuple(r) for r in self.mult))
        object.__setattr__(self, "action", tuple(tuple(r) for r in self.action))
        if len(self.mult) != m or any(len(r) != m for r in self.mult):
            raise UsageError("composition table has the wrong shape")
        if len(self.action) != m or any(len(r) != n for r in self.action):
            raise UsageError("action table has the wrong shape")
        if not 0 <= self.identity < m:
            raise UsageError("identity index out of range")
        bad = self.violations()
        if bad:
            raise UsageError(f"not a monoid action: {bad[0]}")

    def violations(self) -> list:
        m, n = len(self.elements), self.phase.n
        out = []
        e = self.identity
        for g in range(m):
            if self.mult[e][g] != g or self.mult[g][e] != g:
                out.append(("identity", g))
            for h in range(m):
                gh = self.mult[g][h]
                for k in range(m):
                    if self.mult[gh][k] != self.mult[g][self.mult[h][k]]:
                        out.append(("associativity", g, h, k))
                        break
                for x in range(n):
                    if self.action[gh][x] != self.action[g][self.action[h][x]]:
                        out.append(("compatibility", g, h, x))
                        break
        for x in range(n):
            if self.action[e][x] != x:
                out.append(("identity acts", x))
        return out

    def faithful(self) -> "MonoidAction":
        """Quotient by elements that act identically."""
        rows: list = []
        pos: dict = {}
        rep = []
        for g, row in enumerate(self.action):
            if row not in pos:
                pos[row] = len(rows)
                rows.append(row)
                rep.append(g)
        cls = [pos[row] for row in self.action]
        mult = tuple(tuple(cls[self.mult[a][b]] for b in rep) for a in rep)
        return MonoidAction(tuple(self.elements[g] for g in rep), mult, cls[self.identity],
                            self.phase, tuple(rows))


def trivial_action(n: int) -> MonoidAction:
    return MonoidAction(("e",), ((0,),), 0, Carrier.of_size(n), (tuple(range(n)),))


def cyclic_action(n: int) -> MonoidAction:
    """Z/n rotating {0..n-1}."""
    mult = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    act = tuple(tuple((x + g) % n for x in range(n)) for g in range(n))
    return MonoidAction(tuple(range(n)), mult, 0, Carrier.of_size(n), act)


def two_element_action() -> MonoidAction:
    """M = {e, m} with m∘m = m, m acting as the constant 0 on {0, 1}."""
    return MonoidAction(("e", "m"), ((0, 1), (1, 1)), 0, Carrier.of_size(2), ((0, 1), (0, 0)))


def action_to_system(A: MonoidAction) -> tuple[OperationSystem, TSpace]:
    n = A.phase.n
    ops: list[PartialOperation] = []
    for g, row in zip(A.elements, A.action):
        f = PartialOperation(str(g), 1, n, row)
        if f not in ops:
            ops.append(f)
    system = OperationSystem(A.phase, Tier.UNARY, tuple(ops), name="action")
    if not validate_system(system).closed:
        raise UsageError("action maps are not closed under composition")
    if not system.has_identity():
        raise UsageError("identity map missing")
    space = generate_space(system, range(n))
    if space.elements != frozenset(range(n)):
        raise UsageError("phase set is not generated by itself")
    return system, space


def system_to_action(system: OperationSystem, S: TSpace | None = None) -> MonoidAction:
    """The monoid T acting on S by evaluation."""
    if system.tier is not Tier.UNARY or system.is_generated:
        raise UsageError("needs an explicit unary system")
    if not system.has_identity():
        raise UsageError("identity map missing")
    pts = sorted(S.elements) if S is not None else list(range(system.n))
    if generate_space(system, pts).elements != frozenset(pts):
        raise UsageError("phase set is not a space of the system")
    members = list(system.members)
    pos = {f: i for i, f in enumerate(members)}
    try:
        mult = tuple(tuple(pos[compose(f, (g,))] for g in members) for f in members)
    except KeyError:
        raise UsageError("system is not closed under composition") from None
    local = {x: i for i, x in enumerate(pts)}
    act = tuple(tuple(local[f(x)] for x in pts) for f in members)
    phase = Carrier(tuple(system.carrier.label(x) for x in pts))
    return MonoidAction(tuple(f.name for f in members), mult, pos[identity(system.n)], phase, act)


def same_action_table(a: MonoidAction, b: MonoidAction) -> bool:
    """Equal sets of action rows on the same phase set (element names ignored)."""
    return a.phase == b.phase and set(a.action) == set(b.action)


def same_system(a: OperationSystem, b: OperationSystem) -> bool:
    return a.carrier == b.carrier and set(a.members) == set(b.members)


@dataclass(frozen=True)
class IteratedReport:
    system: OperationSystem
    contained_in_end: bool
    witness: object = None


def iterated_map_system(h: Sequence[int] | PartialOperation) -> IteratedReport:
    """{Id} together with every iterate of h, checked to act by endomorphisms."""
    if not isinstance(h, PartialOperation):
        h = PartialOperation("h", 1, len(h), tuple(h))
    if h.arity != 1 or not h.is_total:
        raise UsageError("needs a total self-map")
    n = h.size
    system = generate_closure(Carrier.of_size(n), (identity(n), h), Tier.UNARY)
    system = OperationSystem(system.carrier, Tier.UNARY, system.ops, name="iterates")
    for f in system.members:
        chk = is_t_morphism(system, Morphism(tuple(range(n)), f.table), full=True)
        if not chk:
            return IteratedReport(system, False, {"map": f.name, **chk.witness})
    return IteratedReport(system, True)

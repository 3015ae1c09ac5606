"""Finite topologies, the closed-family equations and the theorem condition evaluators.

Topologies live on an ordered tuple of point ids and store their open sets as
bitmasks over point positions.  Topologies on End or Aut use the positions of
the enumerated maps as points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .carrier import (INDETERMINATE, NOT_APPLICABLE, BudgetExceeded, OperationSystem, Tier,
                      UsageError)
from .galois import (Ambient, canonical_family, galois_monoid, gs_family, int_family,
                     quasi_intermediates, space_join, sub_spaces)
from .morphism import Kind, Morphism, is_t_morphism
from .tspace import is_t_space

TOPOLOGY_BUDGET = 4
TOPOLOGY_HARD_LIMIT = 5


# ------------------------------------------------------------- topologies


def _popcount(m: int) -> int:
    return bin(m).count("1")


def _meet_closure(fam: set[int]) -> set[int]:
    out = set(fam)
    frontier = set(fam)
    while frontier:
        new = {a & b for a in frontier for b in out} - out
        out |= new
        frontier = new
    return out


def _join_closure(fam: set[int]) -> set[int]:
    out = set(fam)
    frontier = set(fam)
    while frontier:
        new = {a | b for a in frontier for b in out} - out
        out |= new
        frontier = new
    return out


@dataclass(frozen=True)
class FiniteTopology:
    points: tuple
    opens: tuple          # sorted bitmasks over point positions

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    @cached_property
    def _pos(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def _open_set(self) -> frozenset:
        return frozenset(self.opens)

    @cached_property
    def closed_masks(self) -> tuple:
        return tuple(sorted(self.full ^ o for o in self.opens))

    @cached_property
    def _closed_set(self) -> frozenset:
        return frozenset(self.closed_masks)

    def mask(self, A: Iterable) -> int:
        m = 0
        for a in A:
            try:
                m |= 1 << self._pos[a]
            except KeyError:
                raise UsageError(f"{a!r} is not a point of the topology") from None
        return m

    def unmask(self, m: int) -> frozenset:
        return frozenset(p for i, p in enumerate(self.points) if m >> i & 1)

    def open_sets(self) -> list[frozenset]:
        return canonical_family(self.unmask(o) for o in self.opens)

    def closed_sets(self) -> list[frozenset]:
        return canonical_family(self.unmask(c) for c in self.closed_masks)

    def is_open(self, A) -> bool:
        return self.mask(A) in self._open_set

    def is_closed(self, A) -> bool:
        return self.mask(A) in self._closed_set

    def closure(self, A) -> frozenset:
        return self.unmask(self._closure_mask(self.mask(A)))

    def _closure_mask(self, m: int) -> int:
        out = self.full
        for c in self.closed_masks:
            if m & c == m:
                out &= c
        return out

    def is_valid(self) -> bool:
        return _is_topology(set(self.opens), self.full)

    def finer_than(self, other: "FiniteTopology") -> bool:
        return set(other.opens) <= set(self.opens)


def _is_topology(opens: set[int], full: int) -> bool:
    if 0 not in opens or full not in opens:
        return False
    return all(a | b in opens and a & b in opens for a in opens for b in opens)


def _make(points, masks) -> FiniteTopology:
    return FiniteTopology(tuple(points), tuple(sorted(masks)))


def from_subbasis(points: Iterable, subbasis: Iterable[Iterable]) -> FiniteTopology:
    """Unions of finite intersections of the subbasis (the empty intersection is the whole set)."""
    pts = tuple(points)
    t = _make(pts, [0])
    full = (1 << len(pts)) - 1
    sub = {t.mask(A) for A in subbasis}
    inter = _meet_closure(sub | {full})
    return _make(pts, _join_closure(inter | {0}))


def from_closed_subbasis(points: Iterable, closed: Iterable[Iterable]) -> FiniteTopology:
    """Coarsest topology in which every given set is closed."""
    pts = tuple(points)
    full = (1 << len(pts)) - 1
    t = _make(pts, [0])
    return from_subbasis(pts, [t.unmask(full ^ t.mask(A)) for A in closed] + [pts])


def closure_of(topology: FiniteTopology, A: Iterable) -> frozenset:
    return topology.closure(A)


def _preorder_topologies(n: int) -> list[int]:
    """Open families of all topologies on n points, via their specialization preorders."""
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    seen = set()
    out = []
    for bits in range(1 << len(off)):
        up = [1 << i for i in range(n)]      # up[i] = points above i, including i
        for k, (i, j) in enumerate(off):
            if bits >> k & 1:
                up[i] |= 1 << j
        transitive = True
        for i in range(n):
            acc = up[i]
            for j in range(n):
                if acc >> j & 1 and up[j] & ~acc:
                    transitive = False
                    break
            if not transitive:
                break
        if not transitive:
            continue
        opens = []
        for m in range(1 << n):
            if all(not (m >> i & 1) or up[i] & ~m == 0 for i in range(n)):
                opens.append(m)
        key = tuple(opens)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def enumerate_topologies(points: Iterable, budget: int | None = None) -> list[FiniteTopology]:
    pts = tuple(points)
    limit = TOPOLOGY_BUDGET if budget is None else min(budget, TOPOLOGY_HARD_LIMIT)
    if len(pts) > limit:
        raise BudgetExceeded("topology enumeration", limit, len(pts))
    fams = sorted(_preorder_topologies(len(pts)))
    return [FiniteTopology(pts, f) for f in fams]


def enumerate_topologies_brute(points: Iterable) -> list[FiniteTopology]:
    """Oracle: filter every family containing ∅ and the whole set."""
    pts = tuple(points)
    n = len(pts)
    if n > 4:
        raise BudgetExceeded("brute-force topology filter", 4, n)
    full = (1 << n) - 1
    middle = [m for m in range(1, full)]
    out = []
    for bits in range(1 << len(middle)):
        fam = {0, full} | {middle[k] for k in range(len(middle)) if bits >> k & 1}
        if _is_topology(fam, full):
            out.append(tuple(sorted(fam)))
    return [FiniteTopology(pts, f) for f in sorted(out)]


# -------------------------------------------------------------- equations


class Context:
    """Families needed by the equations and theorem conditions for one (S, B)."""

    def __init__(self, amb: Ambient, B: Iterable[int] = ()):
        self.amb = amb
        self.B = frozenset(B)
        if not self.B <= amb.S:
            raise UsageError("B must lie inside S")
        self.points = tuple(sorted(amb.S))

    @cached_property
    def quasi_supersets(self) -> list[frozenset]:
        return quasi_intermediates(self.amb.system, self.amb.S, self.B)

    @cached_property
    def sub_spaces(self) -> list[frozenset]:
        return sub_spaces(self.amb.system, self.amb.S)

    def ints(self, kind: Kind) -> list[frozenset]:
        return self._cache(("int", kind), lambda: int_family(self.amb, self.B, kind))

    def gs_masks(self, kind: Kind) -> list[int]:
        def build():
            idx = {m: i for i, m in enumerate(self.amb.maps(kind))}
            return sorted(_mask_of(idx, H) for H in gs_family(self.amb, self.B, kind))
        return self._cache(("gs", kind), build)

    def top_mask(self, kind: Kind) -> int:
        def build():
            idx = {m: i for i, m in enumerate(self.amb.maps(kind))}
            return _mask_of(idx, galois_monoid(self.amb, self.B, kind).members)
        return self._cache(("top", kind), build)

    def comp_table(self, kind: Kind) -> list[list[int]]:
        def build():
            maps = self.amb.maps(kind)
            idx = {m.values: i for i, m in enumerate(maps)}
            return [[idx[a.then(b).values] for b in maps] for a in maps]
        return self._cache(("comp", kind), build)

    def identity_index(self, kind: Kind) -> int:
        return self.amb.maps(kind).index(self.amb.identity)

    def is_submonoid_mask(self, kind: Kind, m: int) -> bool:
        e = self.identity_index(kind)
        if not m >> e & 1:
            return False
        comp = self.comp_table(kind)
        members = [i for i in range(len(comp)) if m >> i & 1]
        return all(m >> comp[a][b] & 1 for a in members for b in members)

    def _cache(self, key, build):
        store = self.__dict__.setdefault("_store", {})
        if key not in store:
            store[key] = build()
        return store[key]


def _mask_of(idx: dict, H: Iterable[Morphism]) -> int:
    m = 0
    for h in H:
        m |= 1 << idx[h]
    return m


@dataclass(frozen=True)
class EquationResult:
    ok: bool
    missing: tuple = ()     # in the Galois family but not produced by the topology
    extra: tuple = ()       # produced by the topology but not in the Galois family

    def __bool__(self):
        return self.ok


EQUATIONS = ("5.1", "5.2", "5.3", "5.4", "5.5")


def equation_holds(ctx: Context, which: str, topology: FiniteTopology) -> EquationResult:
    which = which.replace("EQ", "").replace("_", ".")
    if which in ("5.1", "5.2", "5.3"):
        kind = Kind.AUTO if which == "5.3" else Kind.ENDO
        ints = set(ctx.ints(kind))
        keep_empty = which == "5.2"
        lhs = ints if keep_empty else {K for K in ints if K}
        rhs = {K for K in ctx.quasi_supersets
               if topology.is_closed(K) and (keep_empty or K)}
        return EquationResult(lhs == rhs, tuple(canonical_family(lhs - rhs)),
                              tuple(canonical_family(rhs - lhs)))
    if which in ("5.4", "5.5"):
        kind = Kind.ENDO if which == "5.4" else Kind.AUTO
        lhs = set(ctx.gs_masks(kind))
        top = ctx.top_mask(kind)
        rhs = {c for c in topology.closed_masks
               if c & top == c and ctx.is_submonoid_mask(kind, c)}
        return EquationResult(lhs == rhs, tuple(sorted(lhs - rhs)), tuple(sorted(rhs - lhs)))
    raise UsageError(f"unknown equation {which!r}")


def space_topology(ctx: Context, kind: Kind) -> FiniteTopology:
    """Coarsest topology on S with every fixed set in the family closed."""
    return from_closed_subbasis(ctx.points, ctx.ints(kind))


def map_topology(ctx: Context, kind: Kind) -> FiniteTopology:
    """Coarsest topology on End (Aut) with every Galois submonoid (subgroup) closed."""
    n = len(ctx.amb.maps(kind))
    pts = tuple(range(n))
    full = (1 << n) - 1
    closed = set(ctx.gs_masks(kind))
    # closed sets: intersections of finite unions of the family, plus ∅ and the whole set
    unions = _join_closure(closed | {0})
    closed_all = _meet_closure(unions | {full})
    return FiniteTopology(pts, tuple(sorted(full ^ c for c in closed_all)))


# ------------------------------------------------------ theorem conditions


@dataclass(frozen=True)
class ConditionReport:
    which: str
    clauses: dict
    consistent: bool
    sufficient_condition: object = NOT_APPLICABLE
    notes: tuple = ()
    witnesses: dict = field(default_factory=dict)

    @property
    def violation(self) -> bool:
        return not self.consistent


THEOREMS = ("4.1.2", "4.2.2", "4.3.2", "4.4.2", "14.1.1", "14.2.1")


def _lattice_of(fam: set[int]) -> set[int]:
    """Intersections of nonempty families of nonempty finite unions."""
    return _meet_closure(_join_closure(set(fam)))


def _search_space_topologies(ctx: Context, eq: str, budget: int | None):
    limit = TOPOLOGY_BUDGET if budget is None else min(budget, TOPOLOGY_HARD_LIMIT)
    if len(ctx.points) > limit:
        return INDETERMINATE, None
    for top in enumerate_topologies(ctx.points, limit):
        if equation_holds(ctx, eq, top):
            return True, top
    return False, None


def _search_map_topologies(ctx: Context, kind: Kind, budget: int | None):
    n = len(ctx.amb.maps(kind))
    limit = TOPOLOGY_BUDGET if budget is None else min(budget, TOPOLOGY_HARD_LIMIT)
    if n > limit:
        return INDETERMINATE, None
    eq = "5.4" if kind is Kind.ENDO else "5.5"
    for top in enumerate_topologies(range(n), limit):
        if equation_holds(ctx, eq, top):
            return True, top
    return False, None


def _consistent(clauses: dict) -> bool:
    decided = {v for v in clauses.values() if v is True or v is False}
    return len(decided) <= 1


def theorem_conditions(ctx: Context, which: str, budget: int | None = None) -> ConditionReport:
    which = which.replace("T", "").replace("_", ".")
    system = ctx.amb.system
    if which in ("4.1.2", "4.2.2", "14.1.1", "14.2.1"):
        kind = Kind.ENDO if which in ("4.1.2", "14.1.1") else Kind.AUTO
        eq = "5.1" if kind is Kind.ENDO else "5.3"
        unary_only = which in ("4.1.2", "4.2.2")
        if unary_only and system.tier is not Tier.UNARY:
            return ConditionReport(which, {}, True, NOT_APPLICABLE,
                                   ("stated for the unary tier; use --which 14.1.1 or 14.2.1",))
        ints = ctx.ints(kind)
        iset = set(ints)
        S = ctx.amb.S
        clauses: dict = {}
        wit: dict = {}
        found, top = _search_space_topologies(ctx, eq, budget)
        clauses["i"] = found
        if top is not None:
            wit["i"] = [sorted(o) for o in top.open_sets()]
        t = space_topology(ctx, kind)
        if unary_only:
            bad = next(((a, b) for a, b in itertools.combinations(ints, 2) if a | b not in iset), None)
            clauses["ii"] = bad is None
            if bad:
                wit["ii"] = [sorted(bad[0]), sorted(bad[1])]
            subs = set(ctx.sub_spaces)
            clauses["iii"] = iset <= subs and all(
                space_join(system, S, a, b) in iset for a, b in itertools.combinations(ints, 2))
            clauses["iv"] = equation_holds(ctx, eq, t).ok
        else:
            subs = set(ctx.sub_spaces)
            tm = FiniteTopology(ctx.points, (0,))
            masks = {tm.mask(K) for K in ints}
            bad = None
            for K in sorted(_lattice_of(masks)):
                Ks = tm.unmask(K)
                if Ks in subs and Ks and Ks not in iset:
                    bad = Ks
                    break
            clauses["ii"] = bad is None
            if bad is not None:
                wit["ii"] = sorted(bad)
            clauses["iii"] = equation_holds(ctx, eq, t).ok
        suff = all(space_join(system, S, a, b) in iset for a, b in itertools.combinations(ints, 2))
        notes = []
        consistent = _consistent(clauses)
        if suff and not all(v is True for v in clauses.values() if v is not INDETERMINATE):
            consistent = False
            notes.append("sufficient condition holds but a clause fails")
        return ConditionReport(which, clauses, consistent, suff, tuple(notes), wit)
    if which in ("4.3.2", "4.4.2"):
        kind = Kind.ENDO if which == "4.3.2" else Kind.AUTO
        eq = "5.4" if kind is Kind.ENDO else "5.5"
        gs = set(ctx.gs_masks(kind))
        clauses = {}
        wit = {}
        found, top = _search_map_topologies(ctx, kind, budget)
        clauses["i"] = found
        bad = None
        for M in sorted(_lattice_of(gs)):
            if ctx.is_submonoid_mask(kind, M) and M not in gs:
                bad = M
                break
        clauses["ii"] = bad is None
        if bad is not None:
            wit["ii"] = _codes(ctx, kind, bad)
        clauses["iii"] = equation_holds(ctx, eq, map_topology(ctx, kind)).ok
        suff = True
        for a, b in itertools.combinations(sorted(gs), 2):
            if _generated_mask(ctx, kind, a | b) not in gs:
                suff = False
                break
        consistent = _consistent(clauses)
        notes = []
        if suff and not all(v is True for v in clauses.values() if v is not INDETERMINATE):
            consistent = False
            notes.append("sufficient condition holds but a clause fails")
        if which == "4.4.2":
            notes.append("universal truth of these statements is open; verdict is instance data")
        return ConditionReport(which, clauses, consistent, suff, tuple(notes), wit)
    raise UsageError(f"unknown theorem {which!r}")


def _codes(ctx: Context, kind: Kind, mask: int) -> list[int]:
    maps = ctx.amb.maps(kind)
    return sorted(maps[i].code() for i in range(len(maps)) if mask >> i & 1)


def _generated_mask(ctx: Context, kind: Kind, m: int) -> int:
    """Submonoid (subgroup) generated by the maps in a mask."""
    comp = ctx.comp_table(kind)
    out = m | 1 << ctx.identity_index(kind)
    frontier = out
    while frontier:
        members = [i for i in range(len(comp)) if out >> i & 1]
        fresh = [i for i in range(len(comp)) if frontier >> i & 1]
        new = 0
        for a in fresh:
            for b in members:
                new |= 1 << comp[a][b] | 1 << comp[b][a]
        frontier = new & ~out
        out |= new
    # finite monoids of bijections: closure under composition already contains inverses
    return out


# ------------------------------------------------------- relation topology


@dataclass(frozen=True)
class RelationTopology:
    Sa: frozenset
    Sb: frozenset
    basis: tuple       # R_T(x, y) for every (x, y) in Sa × Sb, as frozensets of pairs

    def basic(self, x: int, y: int) -> frozenset:
        return self._lookup[(x, y)]

    @cached_property
    def _lookup(self) -> dict:
        keys = [(x, y) for x in sorted(self.Sa) for y in sorted(self.Sb)]
        return dict(zip(keys, self.basis))

    def is_open(self, R: Iterable[tuple]) -> bool:
        R = frozenset(R)
        if not all(x in self.Sa and y in self.Sb for x, y in R):
            return False
        return all(self._lookup[p] <= R for p in R)

    def intersection_is_union(self) -> bool:
        for a, b in itertools.combinations(self.basis, 2):
            inter = a & b
            if frozenset().union(*(self._lookup[p] for p in inter)) != inter:
                return False
        return True


def relation_topology(system: OperationSystem, Sa: Iterable[int], Sb: Iterable[int]) -> RelationTopology:
    if system.tier is not Tier.UNARY:
        raise UsageError("the relation topology is defined for the unary tier")
    Sa, Sb = frozenset(Sa), frozenset(Sb)
    ops = list(system.members) if not system.is_generated else _closure_members(system)
    basis = []
    for x in sorted(Sa):
        for y in sorted(Sb):
            pairs = {(x, y)} | {(f(x), f(y)) for f in ops}
            basis.append(frozenset(pairs))
    return RelationTopology(Sa, Sb, tuple(basis))


def _closure_members(system: OperationSystem):
    from .carrier import generate_closure
    return generate_closure(system.carrier, system.ops, Tier.UNARY).ops


@dataclass(frozen=True)
class RelationVerdict:
    applicable: bool
    morphism: bool
    open_and_functional: bool

    @property
    def agree(self) -> bool:
        return self.morphism == self.open_and_functional


def relation_morphism_check(system: OperationSystem, Sa: Iterable[int], Sb: Iterable[int],
                            R: Iterable[tuple]) -> RelationVerdict:
    """Both sides of the open-and-functional characterization of morphisms."""
    R = frozenset(R)
    rt = relation_topology(system, Sa, Sb)
    dom = frozenset(x for x, _ in R)
    applicable = dom <= rt.Sa and is_t_space(system, dom) is True
    functional = len(dom) == len(R)
    if functional:
        sigma = Morphism.from_dict(dict(R))
        morph = is_t_morphism(system, sigma, target=rt.Sb).ok
    else:
        morph = False
    return RelationVerdict(applicable, morph, rt.is_open(R) and functional)

"""Fixed sets, Galois monoids and groups, the two closed families and their lattices.

Set families are canonicalized as sorted lists of frozensets (ordered by their
sorted element tuples); morphism sets as frozensets of ``Morphism`` with a
sorted-by-code view.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable

from .carrier import BudgetExceeded, OperationSystem, Tier, UsageError
from .morphism import Kind, Morphism, enumerate_morphisms
from .tspace import generated_quasi_subspace, is_quasi_space

BRUTE_END_BUDGET = 16


class SetKind(Enum):
    MONOID = "monoid"
    GROUP = "group"


def _kind_of(kind) -> Kind:
    if kind in (Kind.ENDO, SetKind.MONOID, "end", "monoid"):
        return Kind.ENDO
    if kind in (Kind.AUTO, SetKind.GROUP, "aut", "group"):
        return Kind.AUTO
    raise UsageError(f"unknown kind {kind!r}")


def canonical_family(fam: Iterable[Iterable[int]]) -> list[frozenset]:
    return sorted({frozenset(s) for s in fam}, key=lambda s: (len(s), sorted(s)))


@dataclass
class Ambient:
    """A space S inside an operation system, with its End and Aut cached."""

    system: OperationSystem
    S: frozenset
    budget: int | None = None

    def __post_init__(self):
        self.S = frozenset(self.S)
        if not is_quasi_space(self.system, self.S):
            raise UsageError("the ambient set is not closed under the operations")

    @cached_property
    def end(self) -> list[Morphism]:
        return enumerate_morphisms(self.system, self.S, Kind.ENDO, budget=self.budget)

    @cached_property
    def aut(self) -> list[Morphism]:
        return enumerate_morphisms(self.system, self.S, Kind.AUTO, budget=self.budget)

    def maps(self, kind) -> list[Morphism]:
        return self.end if _kind_of(kind) is Kind.ENDO else self.aut

    @cached_property
    def identity(self) -> Morphism:
        return Morphism.identity(self.S)


# ---------------------------------------------------------- Galois objects


def fixed_set(K: Iterable[int], H: Iterable[Morphism]) -> frozenset:
    K = frozenset(K)
    out = set(K)
    for sigma in H:
        m = sigma.as_dict()
        out = {a for a in out if m.get(a, a) == a}
    return frozenset(out)


@dataclass(frozen=True)
class MorphismSet:
    space: frozenset
    members: frozenset
    kind: SetKind

    @property
    def ordered(self) -> list[Morphism]:
        return sorted(self.members, key=lambda m: m.code())

    @property
    def codes(self) -> list[int]:
        return [m.code() for m in self.ordered]

    def __len__(self):
        return len(self.members)

    def __contains__(self, m):
        return m in self.members


def galois_monoid(amb: Ambient, B: Iterable[int], kind=SetKind.MONOID) -> MorphismSet:
    B = frozenset(B)
    if not B <= amb.S:
        raise UsageError("B must lie inside S")
    k = _kind_of(kind)
    mem = frozenset(m for m in amb.maps(k) if all(m(b) == b for b in B))
    return MorphismSet(amb.S, mem, SetKind.MONOID if k is Kind.ENDO else SetKind.GROUP)


def generated_subset(amb: Ambient, X: Iterable[Morphism], kind=SetKind.MONOID) -> MorphismSet:
    k = _kind_of(kind)
    gens = list(X)
    allowed = set(amb.maps(k))
    for g in gens:
        if g not in allowed:
            raise UsageError("generator is not in the ambient monoid/group")
    out = {amb.identity} | set(gens)
    if k is Kind.AUTO:
        out |= {g.inverse() for g in gens}
    frontier = set(out)
    while frontier:
        new = set()
        for a in frontier:
            for b in list(out):
                for c in (a.then(b), b.then(a)):
                    if c not in out:
                        new.add(c)
        out |= new
        frontier = new
    return MorphismSet(amb.S, frozenset(out), SetKind.MONOID if k is Kind.ENDO else SetKind.GROUP)


def is_submonoid(members: Iterable[Morphism], identity: Morphism, group: bool = False) -> bool:
    mem = set(members)
    if identity not in mem:
        return False
    for a in mem:
        for b in mem:
            if a.then(b) not in mem:
                return False
        if group and a.inverse() not in mem:
            return False
    return True


def all_substructures(amb: Ambient, within: Iterable[Morphism], kind=SetKind.MONOID,
                      limit: int = 100_000) -> list[frozenset]:
    """Every submonoid (resp. subgroup) of a finite monoid (resp. group) ``within``."""
    k = _kind_of(kind)
    elems = sorted(set(within), key=lambda m: m.code())
    base = generated_subset(amb, [], k).members
    seen = {base}
    frontier = [base]
    while frontier:
        nxt = []
        for H in frontier:
            for g in elems:
                if g in H:
                    continue
                J = generated_subset(amb, list(H) + [g], k).members
                if J not in seen:
                    seen.add(J)
                    nxt.append(J)
                    if len(seen) > limit:
                        raise BudgetExceeded("substructure enumeration", limit, len(seen))
        frontier = nxt
    return sorted(seen, key=lambda s: (len(s), sorted(m.code() for m in s)))


# -------------------------------------------------------------- families


def _meet_closure(pieces: list[int]) -> set[int]:
    fam = set(pieces)
    frontier = set(pieces)
    while frontier:
        new = set()
        for a in frontier:
            for b in fam:
                c = a & b
                if c not in fam:
                    new.add(c)
        fam |= new
        frontier = new
    return fam


def _to_mask(s: Iterable[int]) -> int:
    m = 0
    for x in s:
        m |= 1 << x
    return m


def _from_mask(m: int) -> frozenset:
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return frozenset(out)


def int_family(amb: Ambient, B: Iterable[int], kind=Kind.ENDO) -> list[frozenset]:
    """Fixed sets S^H containing B, by meet-closure of single-map fixed sets."""
    B = frozenset(B)
    pieces = [_to_mask(amb.S)] + [_to_mask(fixed_set(amb.S, [m])) for m in amb.maps(kind)]
    bm = _to_mask(B)
    return canonical_family(_from_mask(x) for x in _meet_closure(pieces) if x & bm == bm)


def int_family_brute(amb: Ambient, B: Iterable[int], kind=Kind.ENDO,
                     budget: int = BRUTE_END_BUDGET) -> list[frozenset]:
    """Oracle: {S^H | H any subset of End (resp. Aut)} containing B."""
    maps = amb.maps(kind)
    if len(maps) > budget:
        raise BudgetExceeded("brute-force fixed-set family", budget, len(maps))
    B = frozenset(B)
    fix = [_to_mask(fixed_set(amb.S, [m])) for m in maps]
    full = _to_mask(amb.S)
    table = [full] * (1 << len(maps))
    for h in range(1, 1 << len(maps)):
        low = (h & -h).bit_length() - 1
        table[h] = table[h & (h - 1)] & fix[low]
    bm = _to_mask(B)
    return canonical_family(_from_mask(x) for x in set(table) if x & bm == bm)


def _monoid_family_key(s: frozenset):
    return (len(s), sorted(m.code() for m in s))


def canonical_monoid_family(fam: Iterable[frozenset]) -> list[frozenset]:
    return sorted({frozenset(s) for s in fam}, key=_monoid_family_key)


def gs_family(amb: Ambient, B: Iterable[int], kind=SetKind.MONOID) -> list[frozenset]:
    """Galois submonoids (subgroups) over B, by meet-closure of point stabilizers."""
    B = frozenset(B)
    k = _kind_of(kind)
    maps = amb.maps(k)
    top = galois_monoid(amb, B, k).members
    idx = {m: i for i, m in enumerate(maps)}
    top_mask = _to_mask(idx[m] for m in top)
    pieces = [top_mask]
    for x in sorted(amb.S - B):
        stab = _to_mask(i for i, m in enumerate(maps) if m(x) == x)
        pieces.append(top_mask & stab)
    fam = _meet_closure(pieces)
    return canonical_monoid_family(frozenset(maps[i] for i in _from_mask(x)) for x in fam)


def gs_family_brute(amb: Ambient, B: Iterable[int], kind=SetKind.MONOID) -> list[frozenset]:
    """Oracle: {GMn(S/K) | B ⊆ K ⊆ S} by walking every intermediate K."""
    B = frozenset(B)
    rest = sorted(amb.S - B)
    out = []
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            out.append(galois_monoid(amb, B | set(extra), kind).members)
    return canonical_monoid_family(out)


def quasi_intermediates(system: OperationSystem, S: Iterable[int], B: Iterable[int]) -> list[frozenset]:
    """Every quasi-space K with B ⊆ K ⊆ S."""
    S, B = frozenset(S), frozenset(B)
    rest = sorted(S - B)
    out = []
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            K = B | set(extra)
            if is_quasi_space(system, K):
                out.append(K)
    return canonical_family(out)


def sub_spaces(system: OperationSystem, S: Iterable[int]) -> list[frozenset]:
    """The quasi-subspaces of S."""
    return quasi_intermediates(system, S, ())


# --------------------------------------------------------- correspondence


@dataclass(frozen=True)
class CorrespondenceReport:
    kind: str
    int_family: tuple
    gs_family: tuple
    gamma: tuple                # (index in gs_family, index in int_family)
    delta: tuple                # (index in int_family, index in gs_family)
    bijective: bool
    mutually_inverse: bool
    inclusion_reversing: bool
    fixed_closure: bool         # K = S^{G(S/K)} for every K in the fixed family
    monoid_closure: bool        # G(S/S^H) = H for every H in the Galois family
    failures: tuple = ()

    @property
    def ok(self) -> bool:
        return (self.bijective and self.mutually_inverse and self.inclusion_reversing
                and self.fixed_closure and self.monoid_closure)


def verify_correspondence(amb: Ambient, B: Iterable[int], kind=Kind.ENDO) -> CorrespondenceReport:
    B = frozenset(B)
    k = _kind_of(kind)
    ints = int_family(amb, B, k)
    gss = gs_family(amb, B, k)
    int_pos = {s: i for i, s in enumerate(ints)}
    gs_pos = {h: i for i, h in enumerate(gss)}
    failures = []
    gamma, delta = [], []
    for i, H in enumerate(gss):
        K = fixed_set(amb.S, H)
        j = int_pos.get(K)
        if j is None:
            failures.append(("gamma leaves the fixed family", i))
        gamma.append((i, j))
    for j, K in enumerate(ints):
        H = galois_monoid(amb, K, k).members
        i = gs_pos.get(H)
        if i is None:
            failures.append(("delta leaves the Galois family", j))
        delta.append((j, i))
    g_map = dict(gamma)
    d_map = dict(delta)
    bijective = (None not in g_map.values() and None not in d_map.values()
                 and len(set(g_map.values())) == len(gss) == len(ints)
                 and len(set(d_map.values())) == len(ints))
    inverse = bijective and all(d_map[g_map[i]] == i for i in g_map) and all(
        g_map[d_map[j]] == j for j in d_map)
    reversing = True
    for a, b in itertools.permutations(range(len(gss)), 2):
        if gss[a] <= gss[b] and g_map.get(a) is not None and g_map.get(b) is not None:
            if not ints[g_map[b]] <= ints[g_map[a]]:
                reversing = False
                failures.append(("gamma not inclusion reversing", a, b))
    for a, b in itertools.permutations(range(len(ints)), 2):
        if ints[a] <= ints[b] and d_map.get(a) is not None and d_map.get(b) is not None:
            if not gss[d_map[b]] <= gss[d_map[a]]:
                reversing = False
                failures.append(("delta not inclusion reversing", a, b))
    fixed_closure = all(fixed_set(amb.S, galois_monoid(amb, K, k).members) == K for K in ints)
    monoid_closure = all(galois_monoid(amb, fixed_set(amb.S, H), k).members == H for H in gss)
    return CorrespondenceReport(k.value, tuple(ints), tuple(gss), tuple(gamma), tuple(delta),
                                bijective, inverse, reversing, fixed_closure, monoid_closure,
                                tuple(failures))


# ----------------------------------------------------------------- lattice


def space_join(system: OperationSystem, S: Iterable[int], a: frozenset, b: frozenset) -> frozenset:
    if system.tier is Tier.UNARY:
        return a | b
    return generated_quasi_subspace(frozenset(S), a | b, system)


@dataclass(frozen=True)
class LatticeReport:
    sub_lattice_complete: bool
    int_meet_closed: dict
    gs_meet_closed: dict
    int_join_closed: dict
    gs_join_closed: dict
    witnesses: dict = field(default_factory=dict)


def lattice_report(amb: Ambient, B: Iterable[int]) -> LatticeReport:
    B = frozenset(B)
    system, S = amb.system, amb.S
    subs = sub_spaces(system, S)
    sub_set = set(subs)
    complete = True
    for a, b in itertools.combinations(subs, 2):
        if a & b not in sub_set or space_join(system, S, a, b) not in sub_set:
            complete = False
            break
    int_meet, int_join, gs_meet, gs_join, wit = {}, {}, {}, {}, {}
    for k in (Kind.ENDO, Kind.AUTO):
        fam = int_family(amb, B, k)
        fs = set(fam)
        int_meet[k.value] = all(a & b in fs for a, b in itertools.combinations(fam, 2))
        bad = next(((a, b, space_join(system, S, a, b)) for a, b in itertools.combinations(fam, 2)
                    if space_join(system, S, a, b) not in fs), None)
        int_join[k.value] = bad is None
        if bad:
            wit[f"int_join_{k.value}"] = {"left": sorted(bad[0]), "right": sorted(bad[1]),
                                          "join": sorted(bad[2])}
        gfam = gs_family(amb, B, k)
        gs = set(gfam)
        gs_meet[k.value] = all(a & b in gs for a, b in itertools.combinations(gfam, 2))
        gbad = None
        for a, b in itertools.combinations(gfam, 2):
            j = generated_subset(amb, a | b, k).members
            if j not in gs:
                gbad = (a, b, j)
                break
        gs_join[k.value] = gbad is None
        if gbad:
            wit[f"gs_join_{k.value}"] = {
                "left": sorted(m.code() for m in gbad[0]),
                "right": sorted(m.code() for m in gbad[1]),
                "join": sorted(m.code() for m in gbad[2]),
                "join_size": len(gbad[2]),
                "closure_size": len(galois_monoid(amb, fixed_set(S, gbad[2]), k)),
            }
    return LatticeReport(complete, int_meet, gs_meet, int_join, gs_join, wit)

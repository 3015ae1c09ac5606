"""Spaces generated by operation systems, quasi-spaces and family closure checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .carrier import (INDETERMINATE, NOT_APPLICABLE, UNDEFINED, OperationSystem, Tier,
                      UsageError, tuple_index)

DEFAULT_SEARCH_BOUND = 12


@dataclass(frozen=True)
class TSpace:
    system: OperationSystem
    elements: frozenset
    generators_used: frozenset | None = None

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(sorted(self.elements))

    def __contains__(self, x):
        return x in self.elements


def _check_subset(system: OperationSystem, xs: Iterable[int]) -> frozenset:
    s = frozenset(xs)
    bad = [x for x in s if not (isinstance(x, int) and 0 <= x < system.n)]
    if bad:
        raise UsageError(f"{bad} not in carrier")
    return s


def _images(ops, points: frozenset, fresh: frozenset | None = None) -> set:
    """Defined values f(t) for t over ``points``; with ``fresh`` only tuples touching it."""
    out = set()
    pts = sorted(points)
    for f in ops:
        n, table = f.size, f.table
        for t in itertools.product(pts, repeat=f.arity):
            if fresh is not None and not any(a in fresh for a in t):
                continue
            v = table[tuple_index(t, n)]
            if v is not UNDEFINED:
                out.add(v)
    return out


def closure_values(system: OperationSystem, U: frozenset) -> frozenset:
    """Every defined value of every (possibly iterated) operation on U-tuples."""
    gens = system.value_generators
    if gens is None:
        return frozenset(_images(system.ops, U))
    # least fixpoint over the generators; raw elements of U are only fed to
    # the first layer, later layers combine already generated values
    W = frozenset(_images(gens, U))
    fresh = W
    while fresh:
        new = frozenset(_images(gens, W, fresh)) - W
        W = W | new
        fresh = new
    return W


def generate_space(system: OperationSystem, U: Iterable[int]) -> TSpace:
    u = _check_subset(system, U)
    return TSpace(system, closure_values(system, u), u)


def _escape(system: OperationSystem, S: frozenset):
    """A witness (op, tuple, value) leaving S, or None when S is quasi."""
    ops = system.value_generators or system.ops
    pts = sorted(S)
    for f in ops:
        for t in itertools.product(pts, repeat=f.arity):
            v = f.table[tuple_index(t, f.size)]
            if v is not UNDEFINED and v not in S:
                return (f.name, t, v)
    return None


def is_quasi_space(system: OperationSystem, S: Iterable[int]) -> bool:
    s = _check_subset(system, S)
    return _escape(system, s) is None


def quasi_witness(system: OperationSystem, S: Iterable[int]):
    return _escape(system, _check_subset(system, S))


def find_generating_set(system: OperationSystem, S: Iterable[int],
                        bound: int = DEFAULT_SEARCH_BOUND):
    """Some U with <U> = S, None if there is none, INDETERMINATE past the bound."""
    s = _check_subset(system, S)
    if _escape(system, s) is None and s <= closure_values(system, s):
        return s
    return _search_generating_set(system, s, bound)


def _search_generating_set(system: OperationSystem, s: frozenset, bound: int):
    n = system.n
    if n > bound:
        return INDETERMINATE
    for r in range(n + 1):
        for U in itertools.combinations(range(n), r):
            if closure_values(system, frozenset(U)) == s:
                return frozenset(U)
    return None


def is_t_space(system: OperationSystem, S: Iterable[int], bound: int = DEFAULT_SEARCH_BOUND):
    """True, False or INDETERMINATE (carrier beyond the exhaustive-search bound)."""
    s = _check_subset(system, S)
    if _escape(system, s) is None and s <= closure_values(system, s):
        return True
    found = _search_generating_set(system, s, bound)
    if found is INDETERMINATE:
        return INDETERMINATE
    return found is not None


def is_t_space_exhaustive(system: OperationSystem, S: Iterable[int],
                          bound: int = DEFAULT_SEARCH_BOUND):
    """Oracle route: search every U, no shortcut."""
    s = _check_subset(system, S)
    found = _search_generating_set(system, s, bound)
    if found is INDETERMINATE:
        return INDETERMINATE
    return found is not None


def generated_quasi_subspace(space: TSpace | frozenset, X: Iterable[int],
                             system: OperationSystem | None = None) -> frozenset:
    """Least quasi-space containing X, inside S."""
    if isinstance(space, TSpace):
        system, S = space.system, space.elements
    else:
        S = frozenset(space)
        if system is None:
            raise UsageError("a bare subset needs its operation system")
    x = _check_subset(system, X)
    if not x <= S:
        raise UsageError("X must lie inside S")
    ops = system.value_generators or system.ops
    Y = x
    fresh = x
    while fresh:
        new = frozenset(_images(ops, Y, fresh)) - Y
        Y = Y | new
        fresh = new
    return Y


@dataclass(frozen=True)
class FamilyReport:
    all_quasi: bool
    meet_quasi: bool
    pairwise_meets_quasi: bool
    union_quasi: object          # bool or NOT_APPLICABLE
    union_of_spaces_is_space: object
    meets_are_spaces_with_identity: object
    failures: tuple = ()

    @property
    def ok(self) -> bool:
        vals = (self.all_quasi, self.meet_quasi, self.pairwise_meets_quasi, self.union_quasi,
                self.union_of_spaces_is_space, self.meets_are_spaces_with_identity)
        return all(v is True or v is NOT_APPLICABLE for v in vals)


def family_closure_report(system: OperationSystem, spaces: list) -> FamilyReport:
    fam = [_check_subset(system, s) for s in spaces]
    failures = []
    all_quasi = all(is_quasi_space(system, s) for s in fam)
    if not all_quasi:
        failures.append("member not quasi")
    meet = frozenset(range(system.n))
    for s in fam:
        meet &= s
    if not fam:
        meet = frozenset()
    meet_quasi = is_quasi_space(system, meet)
    pair_ok = all(is_quasi_space(system, a & b) for a, b in itertools.combinations(fam, 2))
    if not (meet_quasi and pair_ok):
        failures.append("meet not quasi")
    if system.tier is Tier.UNARY:
        union = frozenset().union(*fam)
        union_quasi = is_quasi_space(system, union)
        if not union_quasi:
            failures.append("union not quasi")
        spaces_only = [s for s in fam if is_t_space(system, s) is True]
        u2 = frozenset().union(*spaces_only)
        union_space = is_t_space(system, u2)
        if union_space is False:
            failures.append("union of spaces not a space")
    else:
        union_quasi = NOT_APPLICABLE
        union_space = NOT_APPLICABLE
    if system.has_identity():
        meets_spaces = is_t_space(system, meet) is True and all(
            is_t_space(system, a & b) is True for a, b in itertools.combinations(fam, 2))
        if not meets_spaces:
            failures.append("meet not a space despite identity")
    else:
        meets_spaces = NOT_APPLICABLE
    return FamilyReport(all_quasi, meet_quasi, pair_ok, union_quasi, union_space,
                        meets_spaces, tuple(failures))

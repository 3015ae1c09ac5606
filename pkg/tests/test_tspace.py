import itertools
import random

import pytest

import oracle
from ggt.carrier import (INDETERMINATE, NOT_APPLICABLE, Carrier, Tier, UsageError,
                         capped_addition, cyclic_system, generate_closure, identity)
from ggt.tspace import (closure_values, family_closure_report, find_generating_set,
                        generate_space, generated_quasi_subspace, is_quasi_space, is_t_space,
                        is_t_space_exhaustive)
from util import raw_ops, unary


def cap3():
    return generate_closure(Carrier.of_size(4), (identity(4), capped_addition(4, 3)),
                            Tier.PARTIAL_GENERALIZED, 2)


def test_orbit_of_zero_under_translations():
    assert generate_space(cyclic_system(3), {0}).elements == {0, 1, 2}


def test_cap3_generated_from_one():
    assert generate_space(cap3(), {1}).elements == {1, 2, 3}


def test_cap3_generated_from_zero_and_one():
    # values: 0, 1, 0+1, 1+1, 1+2
    assert generate_space(cap3(), {0, 1}).elements == {0, 1, 2, 3}


def test_quasi_examples():
    t = cyclic_system(3)
    assert not is_quasi_space(t, {0, 1})
    assert is_quasi_space(t, set())
    assert is_quasi_space(t, {0, 1, 2})
    idsys = unary(3, [(0, 1, 2)])
    for r in range(4):
        for U in itertools.combinations(range(3), r):
            assert is_quasi_space(idsys, U)


def test_space_examples():
    assert is_t_space(cyclic_system(3), set()) is True
    assert is_t_space(cyclic_system(3), {0, 1, 2}) is True
    assert is_t_space(cyclic_system(3), {0, 1}) is False


def test_out_of_range_subset_rejected():
    with pytest.raises(UsageError):
        generate_space(cyclic_system(3), {5})


def test_bound_gives_indeterminate():
    # {1} is generated by {0} under a lone swap, which only the search finds
    s = unary(3, [(1, 0, 2)])
    assert is_t_space(s, {1}, bound=2) is INDETERMINATE
    assert is_t_space(s, {1}) is True
    assert find_generating_set(s, {1}) == {0}


def test_space_needs_search_without_identity():
    # T = {const0, swap01-fix2 ∘ ...}: {1} is the value set of const1 only
    s = unary(3, [(1, 1, 1)])
    assert closure_values(s, frozenset({1})) == {1}
    assert is_t_space(s, {1}) is True
    assert is_t_space(s, {2}) is False
    assert find_generating_set(s, {2}) is None


def test_generated_quasi_subspace_examples():
    t = cyclic_system(3)
    S = generate_space(t, {0})
    assert generated_quasi_subspace(S, set()) == frozenset()
    assert generated_quasi_subspace(S, S.elements) == S.elements
    assert generated_quasi_subspace(S, {0}) == {0, 1, 2}


def test_family_report_identity_passes():
    s = unary(3, [(0, 1, 2)])
    rep = family_closure_report(s, [{0}, {0, 1}, {2}])
    assert rep.ok


def test_family_report_partial_tier_union_not_applicable():
    rep = family_closure_report(cap3(), [{1, 2, 3}, {0, 1, 2, 3}])
    assert rep.union_quasi is NOT_APPLICABLE
    assert rep.ok


def _values(ops, n, U):
    """⟨U⟩ for a composition-closed unary member list: every f(u)."""
    return frozenset(t[u] for _, t in ops for u in U)


def test_generation_and_space_test_against_oracle():
    rng = random.Random(11)
    for _ in range(150):
        n = rng.randint(1, 5)
        tables = oracle.random_unary(rng, n, rng.randint(0, 2))
        if rng.random() < 0.5:
            # drop Id; the remaining members may or may not be composition closed
            tables = [t for t in tables if t != tuple(range(n))] or tables
        s = unary(n, tables)
        closed = all(tuple(f[g[x]] for x in range(n)) in set(tables)
                     for f in tables for g in tables)
        ops = raw_ops(s)
        for r in range(n + 1):
            for U in itertools.combinations(range(n), r):
                got = generate_space(s, U).elements
                if closed:
                    # for a composition-closed system every space is quasi
                    assert got == _values(ops, n, U)
                    assert is_quasi_space(s, got)
                    assert oracle.closed_under(ops, n, got)
        for r in range(n + 1):
            for S in itertools.combinations(range(n), r):
                assert is_t_space(s, S) == is_t_space_exhaustive(s, S)

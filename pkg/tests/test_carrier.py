import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ggt.carrier import (UNDEFINED, Carrier, OperationSystem, PartialOperation, Tier, UsageError,
                         apply, capped_addition, compose, cyclic_system, generate_closure,
                         identity, is_restriction, minimal_generators, translation,
                         validate_system)


def test_carrier_rejects_duplicate_labels():
    with pytest.raises(UsageError):
        Carrier(("a", "a"))


def test_unknown_label_is_usage_error():
    with pytest.raises(UsageError):
        Carrier(("a", "b")).idx("c")


def test_table_length_enforced():
    with pytest.raises(UsageError):
        PartialOperation("f", 2, 3, (0,) * 8)


def test_none_becomes_undefined():
    f = PartialOperation("f", 1, 2, (0, None))
    assert f(1) is UNDEFINED
    assert not f.is_total


def test_apply_checks_arity_and_range():
    f = translation(3, 1)
    assert apply(f, (2,)) == 0
    with pytest.raises(UsageError):
        apply(f, (0, 1))
    with pytest.raises(UsageError):
        apply(f, (3,))


def test_unary_tier_rejects_partial_and_binary():
    c = Carrier.of_size(2)
    with pytest.raises(UsageError):
        OperationSystem(c, Tier.UNARY, (PartialOperation("f", 1, 2, (0, None)),))
    with pytest.raises(UsageError):
        OperationSystem(c, Tier.UNARY, (PartialOperation("g", 2, 2, (0, 0, 0, 0)),))


def test_extensional_equality_ignores_names():
    assert PartialOperation("a", 1, 2, (1, 0)) == PartialOperation("b", 1, 2, (1, 0))


def test_compose_arities_add():
    add = capped_addition(4, 3)
    c = compose(add, (add, identity(4)))
    assert c.arity == 3
    assert c(1, 1, 1) == 3
    assert c(2, 1, 1) is UNDEFINED
    assert c(0, 0, 2) == 2


def test_compose_partial_inner_undefined_propagates():
    f = PartialOperation("f", 1, 3, (1, None, 2))
    g = PartialOperation("g", 1, 3, (0, 0, 1))
    # g(f(x))
    assert compose(g, (f,)).table == (0, UNDEFINED, 1)


def test_is_restriction():
    f = PartialOperation("f", 1, 3, (1, 2, 0))
    g = PartialOperation("g", 1, 3, (1, None, 0))
    assert is_restriction(g, f)
    assert not is_restriction(f, g)


def test_cyclic_system_is_closed():
    assert validate_system(cyclic_system(4)).closed


def test_unclosed_system_reports_violation():
    sys_ = OperationSystem(Carrier.of_size(3), Tier.UNARY, (identity(3), translation(3, 1)))
    rep = validate_system(sys_)
    assert not rep.closed
    assert rep.violations


def test_generate_closure_unary_is_cyclic_group():
    s = generate_closure(Carrier.of_size(5), (translation(5, 1),), Tier.UNARY)
    assert set(s.members) == set(cyclic_system(5).members)


def test_capped_closure_keeps_generators():
    gens = (identity(4), capped_addition(4, 3))
    s = generate_closure(Carrier.of_size(4), gens, Tier.PARTIAL_GENERALIZED, 2)
    assert s.arity_cap == 2
    assert s.value_generators == gens
    assert all(f.arity <= 2 for f in s.members)


def test_minimal_generators_of_cyclic():
    gens = minimal_generators(cyclic_system(3))
    s = generate_closure(Carrier.of_size(3), gens, Tier.UNARY)
    assert set(s.members) == set(cyclic_system(3).members)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.lists(st.integers(0, n - 1), min_size=n,
                                                      max_size=n), min_size=1, max_size=3))))
def test_unary_closure_is_composition_closed(data):
    n, tables = data
    gens = [PartialOperation(f"g{i}", 1, n, tuple(t)) for i, t in enumerate(tables)]
    s = generate_closure(Carrier.of_size(n), gens, Tier.UNARY)
    assert validate_system(s).closed
    assert set(gens) <= set(s.members)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 3).flatmap(lambda n: st.tuples(
    st.just(n),
    *[st.lists(st.one_of(st.none(), st.integers(0, n - 1)), min_size=n, max_size=n)
      for _ in range(3)])))
def test_composition_is_associative(data):
    n, a, b, c = data
    f, g, h = (PartialOperation(x, 1, n, tuple(t)) for x, t in zip("fgh", (a, b, c)))
    assert compose(f, (compose(g, (h,)),)) == compose(compose(f, (g,)), (h,))


def test_binary_composite_layout_matches_definition():
    n = 3
    f = PartialOperation.from_function("f", n, 2, lambda x, y: (x + 2 * y) % n)
    g = PartialOperation.from_function("g", n, 2, lambda x, y: (x * y) % n)
    h = translation(n, 1)
    c = compose(f, (g, h))
    for x, y, z in itertools.product(range(n), repeat=3):
        assert c(x, y, z) == f(g(x, y), h(z))

import random

from hypothesis import given, settings, strategies as st

import oracle
from ggt.carrier import cyclic_system
from ggt.galois import (Ambient, all_substructures, fixed_set, galois_monoid, generated_subset,
                        gs_family, gs_family_brute, int_family, int_family_brute, lattice_report,
                        quasi_intermediates, verify_correspondence)
from ggt.instance import load_instance
from ggt.morphism import Kind, Morphism
from ggt.topospace import powerset_system, sierpinski
from util import raw_ops, unary


def amb_of(name):
    inst = load_instance(name)
    return inst, Ambient(inst.system, inst.S)


def test_fixed_set_examples():
    S = {0, 1, 2}
    assert fixed_set(S, []) == S
    assert fixed_set(S, [Morphism.identity(S)]) == S
    assert fixed_set(S, [Morphism((0, 1, 2), (1, 2, 0))]) == frozenset()


def test_galois_monoid_of_whole_space_is_identity():
    amb = Ambient(cyclic_system(3), {0, 1, 2})
    assert galois_monoid(amb, {0, 1, 2}, Kind.ENDO).members == {amb.identity}


def test_symmetric_group_on_four_points():
    inst, amb = amb_of("example-3-3-6")
    assert len(galois_monoid(amb, (), Kind.AUTO)) == 24


def test_generated_subsets():
    inst, amb = amb_of("example-3-3-6")
    assert generated_subset(amb, [], Kind.AUTO).members == {amb.identity}
    t12, t34 = inst.morphisms["t12"], inst.morphisms["t34"]
    assert len(generated_subset(amb, [t12, t34], Kind.AUTO)) == 4
    # an inverse-closed generating set yields the same closure in both kinds
    assert (generated_subset(amb, [t12, t34], Kind.AUTO).members
            == generated_subset(amb, [t12, t34], Kind.ENDO).members)


def test_two_point_identity_fixed_family_is_power_set():
    inst, amb = amb_of("example-2-1-4")
    assert set(int_family(amb, (), Kind.ENDO)) == {frozenset(), frozenset({0}), frozenset({1}),
                                                    frozenset({0, 1})}


def test_whole_space_base_gives_single_members():
    amb = Ambient(cyclic_system(3), {0, 1, 2})
    assert gs_family(amb, {0, 1, 2}, Kind.ENDO) == [frozenset({amb.identity})]


def test_stabilizer_monoids_present():
    inst, amb = amb_of("example-3-3-3")
    fam = set(gs_family(amb, (), Kind.ENDO))
    for name in ("M1", "M2"):
        assert inst.morphism_sets[name] in fam


def test_transposition_groups_present():
    inst, amb = amb_of("example-3-3-6")
    fam = set(gs_family(amb, (), Kind.AUTO))
    assert inst.morphism_sets["G1"] in fam
    assert inst.morphism_sets["G2"] in fam
    assert frozenset(amb.aut) in fam
    assert frozenset({amb.identity}) in fam


def test_empty_space_correspondence():
    amb = Ambient(unary(2, [(0, 1)]), ())
    rep = verify_correspondence(amb, (), Kind.ENDO)
    assert rep.ok
    assert rep.int_family == (frozenset(),)


def test_sierpinski_correspondence_both_kinds():
    amb = Ambient(powerset_system(sierpinski()), range(4))
    for k in Kind:
        assert verify_correspondence(amb, (), k).ok


def test_sierpinski_fixed_family_matches_oracle():
    s = powerset_system(sierpinski())
    amb = Ambient(s, range(4))
    ends = oracle.end(raw_ops(s), 4, range(4))
    ints, gss = oracle.closed_families(ends, range(4), ())
    assert set(int_family(amb, (), Kind.ENDO)) == ints
    assert {frozenset(m.values for m in H) for H in gs_family(amb, (), Kind.ENDO)} == gss
    assert len(ints) == 12


def test_lattice_flags_join_failure_example_3_3_3():
    inst, amb = amb_of("example-3-3-3")
    rep = lattice_report(amb, ())
    assert rep.gs_join_closed["end"] is False
    w = rep.witnesses["gs_join_end"]
    assert w["join_size"] == 3


def test_lattice_flags_join_failure_example_3_3_6():
    inst, amb = amb_of("example-3-3-6")
    rep = lattice_report(amb, ())
    assert rep.gs_join_closed["aut"] is False


def test_one_point_universe_all_pass():
    amb = Ambient(unary(1, [(0,)]), {0})
    rep = lattice_report(amb, ())
    assert rep.sub_lattice_complete
    assert all(rep.int_meet_closed.values()) and all(rep.gs_join_closed.values())


def test_intermediate_counts_example_2_1_4():
    inst, amb = amb_of("example-2-1-4")
    assert len(quasi_intermediates(inst.system, inst.S, ())) == 4
    grp = galois_monoid(amb, (), Kind.AUTO).members
    assert len(all_substructures(amb, grp, Kind.AUTO)) == 2


def test_families_against_oracle_random():
    rng = random.Random(21)
    for _ in range(120):
        n = rng.randint(1, 4)
        s = unary(n, oracle.random_unary(rng, n, rng.randint(0, 2)))
        S = range(n)
        B = frozenset(x for x in S if rng.random() < 0.3)
        amb = Ambient(s, S)
        for kind, ref in ((Kind.ENDO, oracle.end), (Kind.AUTO, oracle.aut)):
            maps = ref(raw_ops(s), n, S)
            ints, gss = oracle.closed_families(maps, S, B)
            assert set(int_family(amb, B, kind)) == ints
            assert {frozenset(m.values for m in H) for H in gs_family(amb, B, kind)} == gss
            if len(amb.maps(kind)) <= 16:
                assert int_family_brute(amb, B, kind) == int_family(amb, B, kind)
            assert gs_family_brute(amb, B, kind) == gs_family(amb, B, kind)
            assert verify_correspondence(amb, B, kind).ok


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.lists(st.integers(0, n - 1), min_size=n, max_size=n), max_size=2),
    st.sets(st.integers(0, n - 1)))))
def test_galois_connection_laws(data):
    n, tables, K = data
    s = unary(n, [tuple(range(n))] + [tuple(t) for t in tables])
    amb = Ambient(s, range(n))
    for kind in Kind:
        G = galois_monoid(amb, K, kind).members
        closed_K = fixed_set(amb.S, G)
        # K ⊆ S^{G(K)} and the closure is idempotent
        assert frozenset(K) <= closed_K
        assert galois_monoid(amb, closed_K, kind).members == G

import pytest
from hypothesis import given, settings, strategies as st

import oracle
from ggt.carrier import Carrier, UsageError, cyclic_system
from ggt.dynsys import (MonoidAction, action_to_system, cyclic_action, iterated_map_system,
                        same_action_table, same_system, system_to_action, trivial_action,
                        two_element_action)
from ggt.galois import Ambient, verify_correspondence
from ggt.morphism import Kind, enumerate_morphisms
from util import unary


def test_trivial_action_gives_identity_system():
    system, space = action_to_system(trivial_action(3))
    assert [f.table for f in system.members] == [(0, 1, 2)]
    assert space.elements == {0, 1, 2}


def test_two_element_action_system_and_end():
    system, space = action_to_system(two_element_action())
    assert {f.table for f in system.members} == {(0, 1), (0, 0)}
    ends = enumerate_morphisms(system, space.elements, Kind.ENDO)
    assert {m.values for m in ends} == {(0, 1), (0, 0)}


def test_rotation_action_gives_translations():
    system, _ = action_to_system(cyclic_action(3))
    assert same_system(system, cyclic_system(3))


def test_identity_system_gives_trivial_action():
    a = system_to_action(unary(2, [(0, 1)]))
    assert len(a.elements) == 1


def test_translations_give_rotation_action():
    a = system_to_action(cyclic_system(3))
    assert same_action_table(a, cyclic_action(3))


def test_bad_action_rejected():
    with pytest.raises(UsageError):
        MonoidAction(("e", "m"), ((0, 1), (1, 0)), 0, Carrier.of_size(2), ((0, 1), (0, 0)))


def test_iterates_of_identity():
    r = iterated_map_system((0, 1, 2))
    assert len(r.system.members) == 1 and r.contained_in_end


def test_iterates_of_rotation():
    r = iterated_map_system((1, 2, 0))
    assert len(r.system.members) == 3 and r.contained_in_end


def test_iterates_of_constant():
    r = iterated_map_system((0, 0))
    assert {f.table for f in r.system.members} == {(0, 1), (0, 0)}
    assert r.contained_in_end


@pytest.mark.parametrize("action", [trivial_action(2), cyclic_action(3), cyclic_action(4),
                                    two_element_action()])
def test_round_trips(action):
    system, space = action_to_system(action)
    back = system_to_action(system, space)
    assert same_action_table(back, action.faithful())
    assert same_system(action_to_system(back)[0], system)
    amb = Ambient(system, space.elements)
    for k in Kind:
        assert verify_correspondence(amb, (), k).ok


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.integers(0, n - 1), min_size=n,
                                                    max_size=n)))
def test_iterates_are_endomorphisms(h):
    r = iterated_map_system(h)
    assert r.contained_in_end
    n = len(h)
    ref = oracle.submonoid_closure([tuple(h)], range(n))
    assert {f.table for f in r.system.members} == set(ref)

"""Induced transducer construction, reconstruction, and verification.

The expected tables below were frozen from hand-checked runs; the
reconstruction tests compare against the parent automaton as an
independent oracle.
"""

import dataclasses

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from autperm import (
    act,
    batch_states,
    batch_weight_state,
    build_naturally_induced,
    compose,
    digits_of,
    reconstruct_many,
    reconstruct_output,
    reorder,
    sequence_term,
    transduce,
    transducer_to_doc,
    verify_induced,
    weight_group,
)
from autperm.automaton import run
from autperm.transducer import minimal_images

from .conftest import make_dfao

ID2, SW = (0, 1), (1, 0)
ID3, T12, T23 = (0, 1, 2), (1, 0, 2), (0, 2, 1)

GOLDEN = {
    # name: (width, states, delta, lam)
    "thue_morse": (2, ((0, 1),), ((0, 0),), ((ID2, SW),)),
    "rudin_shapiro": (
        2,
        ((0, 1), (2, 3)),
        ((0, 1), (0, 1)),
        ((ID2, ID2), (ID2, SW)),
    ),
    "five_state": (
        3,
        ((0, 1, 2), (0, 3, 4)),
        ((0, 1), (0, 0)),
        ((T12, T23), (T12, ID3)),
    ),
    "six_state": (
        3,
        ((0, 1, 2), (3, 4, 5)),
        ((0, 1), (0, 1)),
        ((T23, T12), (T23, T23)),
    ),
    "mod3_residue": (3, ((0, 1, 2),), ((0, 0),), ((T23, T12),)),
}

GROUP_ORDERS = {
    "thue_morse": 2,
    "rudin_shapiro": 2,
    "five_state": 6,
    "six_state": 6,
    "mod3_residue": 6,
}


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden_tables(name, ex):
    width, states, delta, lam = GOLDEN[name]
    t = build_naturally_induced(ex[name])
    assert t.width == width
    assert t.states == states
    assert t.delta == delta
    assert t.lam == lam
    assert t.initial == 0


def test_state_names_resolve_through_parent(ex):
    t = build_naturally_induced(ex["five_state"])
    assert t.state_names(0) == ("q0", "q1", "q2")
    assert t.state_names(1) == ("q0", "q3", "q4")


def test_minimal_images_of_nonconnected_automaton(ex):
    n0, sets = minimal_images(ex["base3_nonsync"])
    assert n0 == 2
    assert sets == [frozenset({1, 2})]


def test_build_requires_strong_connectivity(ex):
    with pytest.raises(ValueError, match="strongly connected"):
        build_naturally_induced(ex["base3_nonsync"])


def test_component_transducer_is_the_toggle(base3_component):
    t = build_naturally_induced(base3_component)
    assert t.width == 2 and t.n == 1
    assert t.lam == (((0, 1), (1, 0), (0, 1)),)


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_verification_flags_and_group_order(name, ex):
    rep = verify_induced(build_naturally_induced(ex[name]))
    assert rep.ok(), rep.as_dict()
    assert rep.group_order == GROUP_ORDERS[name]


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_reconstruction_matches_direct_run(name, ex):
    a = ex[name]
    t = build_naturally_induced(a)
    for n in range(2000):
        assert reconstruct_output(t, n) == sequence_term(a, n)


def test_reconstruct_many_is_the_batch_form(ex, base3_component):
    for a in (ex["six_state"], base3_component):
        t = build_naturally_induced(a)
        ns = np.arange(10**4)
        want = [a.output[s] for s in batch_states(a, ns)]
        assert reconstruct_many(t, ns) == want


def test_weight_group_of_six_state_is_s3(ex):
    gt = weight_group(build_naturally_induced(ex["six_state"]))
    assert len(gt) == 6
    assert gt.elements[0] == ID3


words = st.lists(st.integers(0, 1), max_size=12).map(tuple)


@given(words, words, st.sampled_from(sorted(GOLDEN)))
def test_weights_compose_along_split_words(ex, u, v, name):
    t = build_naturally_induced(ex[name])
    gu, mid = transduce(t, t.initial, u)
    gv, end = transduce(t, mid, v)
    g, end2 = transduce(t, t.initial, u + v)
    assert end2 == end
    assert g == compose(gu, gv)


@given(words, st.sampled_from(sorted(GOLDEN)))
def test_weight_transports_coordinates(ex, w, name):
    # Acting with the walk weight on the end tuple recovers the image of
    # every coordinate under the parent automaton.
    a = ex[name]
    t = build_naturally_induced(a)
    for q in range(t.n):
        g, end = transduce(t, q, w)
        images = tuple(run(a, x, w) for x in t.states[q])
        assert act(g, t.states[end]) == images


@given(st.lists(st.integers(0, 10**6), max_size=40))
def test_batch_weight_state_matches_scalar_walks(ex, ns):
    t = build_naturally_induced(ex["six_state"])
    gi, si, bt = batch_weight_state(t, np.array(ns, dtype=np.int64))
    for j, n in enumerate(ns):
        g, s = transduce(t, t.initial, digits_of(n, t.k))
        assert bt.table.elements[gi[j]] == g
        assert si[j] == s


def test_batch_weight_state_rejects_negative(ex):
    t = build_naturally_induced(ex["thue_morse"])
    with pytest.raises(ValueError, match="nonnegative"):
        batch_weight_state(t, np.array([3, -1]))


def test_reorder_conjugates_without_changing_outputs(ex):
    a = ex["five_state"]
    t = build_naturally_induced(a)
    twisted = reorder(t, [ID3, (0, 2, 1)])
    assert twisted.states[1] == (0, 4, 3)
    assert verify_induced(twisted).ok()
    for n in range(500):
        assert reconstruct_output(twisted, n) == sequence_term(a, n)
    assert len(weight_group(twisted)) == len(weight_group(t))


def test_reorder_rejects_bad_shapes(ex):
    t = build_naturally_induced(ex["five_state"])
    with pytest.raises(ValueError, match="one permutation per state"):
        reorder(t, [ID3])
    with pytest.raises(ValueError, match="width-sized"):
        reorder(t, [ID3, (1, 0)])
    with pytest.raises(ValueError, match="initial state first"):
        reorder(t, [(1, 0, 2), ID3])


def test_verify_flags_catch_tampering(ex):
    t = build_naturally_induced(ex["rudin_shapiro"])
    bad_lam = dataclasses.replace(
        t, lam=((ID2, ID2), (ID2, (0, 0)))
    )
    rep = verify_induced(bad_lam)
    assert not rep.weights_are_permutations and not rep.ok()

    bad_delta = dataclasses.replace(t, delta=((0, 1), (1, 1)))
    rep = verify_induced(bad_delta)
    assert not rep.one_step_consistent and not rep.ok()

    bad_states = dataclasses.replace(t, states=((0, 1), (3, 2)))
    rep = verify_induced(bad_states)
    assert not rep.one_step_consistent

    dup = dataclasses.replace(t, states=((0, 1), (1, 0)))
    rep = verify_induced(dup)
    assert not rep.states_not_equivalent


def test_transducer_doc_shape(ex):
    t = build_naturally_induced(ex["six_state"])
    doc = transducer_to_doc(t)
    assert doc["k"] == 2 and doc["width"] == 3
    assert doc["states"] == [["q0", "q1", "q2"], ["q3", "q4", "q5"]]
    assert doc["weights"][0][1] == [1, 0, 2]
    assert doc["delta"] == [[0, 1], [0, 1]]


def test_identity_weight_walks_keep_coordinates():
    # Width-1 case: a synchronizing parent collapses to singleton tuples
    # with identity weights everywhere.
    a = make_dfao(2, ((1, 0), (2, 1), (3, 2), (0, 0)))
    t = build_naturally_induced(a)
    assert t.width == 1
    assert all(p == (0,) for row in t.lam for p in row)
    for n in range(200):
        assert reconstruct_output(t, n) == sequence_term(a, n)

"""Walk-length and walk-value invariants.

Expected reports were frozen from brute-force word enumeration over the
same automata; verify_structure repeats that enumeration inline, so the
two halves of this file check each other.
"""

import json

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from autperm import (
    analyze,
    brute_force_families,
    build_naturally_induced,
    compose,
    identity,
    reduce_to_special,
    reorder,
    sequence_term,
    transduce,
    verify_structure,
)
from autperm.automaton import is_strongly_connected
from autperm.structure import final_component_invariants, inverse_path

from .conftest import make_dfao

ID2, SW = (0, 1), (1, 0)
ID3, T12, T13, T23 = (0, 1, 2), (1, 0, 2), (2, 1, 0), (0, 2, 1)
C123, C132 = (1, 2, 0), (2, 0, 1)
S3 = (ID3, T23, T12, C123, C132, T13)
A3 = (ID3, C123, C132)

# Small machines that exercise corners the bundled examples miss: k = 3
# with a nontrivial digit-weight multiplier (k0 = 2), and a width-3
# period-2 machine whose value classes split the even subgroup.
PARITY3 = ("parity3", 3, ((1, 0, 1), (0, 1, 0)))
TWIST3 = ("twist3", 3, ((2, 1, 2), (2, 0, 2), (0, 2, 0)))
WIDE2 = ("wide2", 2, ((0, 1), (3, 0), (3, 0), (2, 3)))
CUSTOM = {name: (k, delta) for name, k, delta in (PARITY3, TWIST3, WIDE2)}

REPORTS = {
    "thue_morse": dict(
        d=1, m0=1, G=(ID2, SW), g0=ID2, l0=0, K=1,
        d_matrix=((1,),), d_prime=1, d_dprime=((1,),), k0=1, m0_prime=1,
        s0={ID2: 0, SW: 0}, G0=(ID2, SW), g0_prime=ID2, group_order=2,
    ),
    "rudin_shapiro": dict(
        d=1, m0=3, G=(ID2, SW), g0=ID2, l0=1, K=2,
        d_matrix=((2, 2), (2, 2)), d_prime=1, d_dprime=((2, 2), (2, 2)),
        k0=1, m0_prime=3,
        s0={ID2: 0, SW: 0}, G0=(ID2, SW), g0_prime=ID2, group_order=2,
    ),
    "five_state": dict(
        d=1, m0=5, G=S3, g0=ID3, l0=2, K=4,
        d_matrix=((1, 2), (1, 2)), d_prime=1, d_dprime=((1, 2), (1, 2)),
        k0=1, m0_prime=7,
        s0={g: 0 for g in S3}, G0=S3, g0_prime=ID3, group_order=6,
    ),
    "six_state": dict(
        d=2, m0=2, G=A3, g0=T23, l0=1, K=6,
        d_matrix=((2, 2), (2, 2)), d_prime=1, d_dprime=((2, 2), (2, 2)),
        k0=1, m0_prime=3,
        s0={g: 0 for g in A3}, G0=A3, g0_prime=ID3, group_order=6,
    ),
    "mod3_residue": dict(
        d=2, m0=1, G=A3, g0=T23, l0=0, K=3,
        d_matrix=((3,),), d_prime=3, d_dprime=((1,),), k0=1, m0_prime=1,
        s0={ID3: 0, C123: 2, C132: 1}, G0=(ID3,), g0_prime=C132,
        group_order=6,
    ),
    "base3_component": dict(
        d=1, m0=1, G=(ID2, SW), g0=ID2, l0=0, K=2,
        d_matrix=((2,),), d_prime=2, d_dprime=((1,),), k0=1, m0_prime=1,
        s0={ID2: 0, SW: 1}, G0=(ID2,), g0_prime=SW, group_order=2,
    ),
    "parity3": dict(
        d=1, m0=1, G=(ID2, SW), g0=ID2, l0=0, K=2,
        d_matrix=((2,),), d_prime=2, d_dprime=((1,),), k0=2, m0_prime=1,
        s0={ID2: 0, SW: 1}, G0=(ID2,), g0_prime=SW, group_order=2,
    ),
    "twist3": dict(
        d=1, m0=3, G=(ID2, SW), g0=ID2, l0=2, K=18,
        d_matrix=((2, 6), (2, 6)), d_prime=2, d_dprime=((1, 3), (1, 3)),
        k0=2, m0_prime=3,
        s0={ID2: 0, SW: 1}, G0=(ID2,), g0_prime=SW, group_order=2,
    ),
    "wide2": dict(
        d=2, m0=2, G=A3, g0=T23, l0=1, K=6,
        d_matrix=((6, 6), (6, 6)), d_prime=3, d_dprime=((2, 2), (2, 2)),
        k0=1, m0_prime=2,
        s0={ID3: 0, C123: 2, C132: 1}, G0=(ID3,), g0_prime=C132,
        group_order=6,
    ),
}

ALL_CHECK_KEYS = {
    "weights_confined_to_cosets",
    "cosets_filled_after_m0",
    "value_classes_match_s0",
    "value_cosets_match_G0_g0p",
    "d_matrix_matches_brute_force",
    "l0_matches",
}


@pytest.fixture(scope="module")
def custom_results():
    return {
        name: analyze(make_dfao(k, delta)) for name, (k, delta) in CUSTOM.items()
    }


@pytest.fixture(scope="module")
def all_results(results, custom_results):
    merged = dict(results)
    merged.update(custom_results)
    return merged


@pytest.mark.parametrize("name", sorted(REPORTS))
def test_report_matches_frozen_values(name, all_results):
    rep = all_results[name].report
    for field, want in REPORTS[name].items():
        assert getattr(rep, field) == want, field


def test_six_state_odd_coset_is_the_transpositions(results):
    rep = results["six_state"].report
    odd = {compose(rep.g0, g) for g in rep.G}
    assert odd == {T12, T13, T23}
    assert odd == {compose(g, rep.g0) for g in rep.G}


def relations(res):
    rep = res.report
    t = res.transducer
    k, n = t.k, t.n
    assert rep.K == k**rep.l0 * (k**rep.d - 1)
    assert (k**rep.d - 1) % rep.d_prime == 0
    assert len(rep.d_matrix) == n and len(rep.d_dprime) == n
    for row_m, row_d in zip(rep.d_matrix, rep.d_dprime):
        assert len(row_m) == len(row_d)
        for x, y in zip(row_m, row_d):
            assert y >= 1 and x % y == 0
    # s0 is a homomorphism onto Z_{d'} with kernel G0.
    assert set(rep.s0) == set(rep.G)
    assert set(rep.s0.values()) == set(range(rep.d_prime))
    for g in rep.G:
        for h in rep.G:
            assert rep.s0[compose(g, h)] == (rep.s0[g] + rep.s0[h]) % rep.d_prime
    assert tuple(sorted(rep.G0)) == tuple(
        sorted(g for g in rep.G if rep.s0[g] == 0)
    )
    assert len(rep.G0) * rep.d_prime == len(rep.G)
    if rep.d_prime > 1:
        assert rep.s0[rep.g0_prime] == 1
    else:
        assert rep.g0_prime == identity(t.width)
    power = identity(t.width)
    for _ in range(rep.d):
        power = compose(power, rep.g0)
    assert power in set(rep.G)
    assert rep.group_order == rep.d * len(rep.G)


@pytest.mark.parametrize("name", sorted(REPORTS))
def test_invariant_relations(name, all_results):
    relations(all_results[name])


@pytest.mark.parametrize("name", sorted(REPORTS))
def test_verification_against_word_enumeration(name, all_results):
    res = all_results[name]
    depth = 10 if res.transducer.k == 2 else 8
    checks = verify_structure(res, depth)
    assert set(checks) == ALL_CHECK_KEYS
    assert all(checks.values()), checks


def test_families_of_short_words(results):
    t = results["thue_morse"].transducer
    fams = brute_force_families(t, 3)
    assert fams[3][0] == {ID2: {0, 3, 5, 6}, SW: {1, 2, 4, 7}}
    assert fams[0][0] == {ID2: {0}}


@pytest.mark.parametrize(
    "name,power", [("thue_morse", 1), ("rudin_shapiro", 1), ("five_state", 1),
                   ("six_state", 2), ("mod3_residue", 2)]
)
def test_reduction_powers(name, power, ex):
    p, reduced = reduce_to_special(ex[name])
    assert p == power
    if p == 1:
        assert reduced is ex[name]
    else:
        rep = analyze(reduced).report
        assert rep.d == 1 and rep.k0 == 1


def test_reduced_six_state_square(ex):
    p, sq = reduce_to_special(ex["six_state"])
    assert p == 2 and sq.k == 4
    res = analyze(sq)
    rep = res.report
    assert rep.d == 1 and rep.k0 == 1
    assert rep.m0 == 2 and rep.l0 == 1 and rep.K == 12
    assert rep.G == A3 and rep.group_order == 3
    assert rep.d_matrix == ((2, 2), (2, 2))
    assert res.transducer.lam == (
        (ID3, C132, C123, C123),
        (ID3, C132, ID3, ID3),
    )
    for n in range(300):
        assert sequence_term(sq, n) == sequence_term(ex["six_state"], n)


def test_reduced_mod3_square(ex):
    p, sq = reduce_to_special(ex["mod3_residue"])
    assert p == 2
    rep = analyze(sq).report
    assert rep.d == 1 and rep.K == 3 and rep.d_prime == 3
    assert rep.group_order == 3
    assert rep.s0 == {ID3: 0, C123: 2, C132: 1}
    assert rep.G0 == (ID3,) and rep.g0_prime == C132


def test_custom_fixture_reductions(custom_results):
    for name, (k, delta) in CUSTOM.items():
        p, _ = reduce_to_special(make_dfao(k, delta))
        assert p == 2, name


def test_final_components_of_nonconnected_automaton(ex):
    assert final_component_invariants(ex["base3_nonsync"]) == [((1, 2), 1, 1)]


@pytest.mark.parametrize("name", ["five_state", "six_state", "wide2"])
def test_inverse_paths_close_walks(name, all_results):
    res = all_results[name]
    t, rep = res.transducer, res.report
    for w in ((), (0,), (1,), (0, 1, 1), (1, 0, 1, 1, 0)):
        for q in range(t.n):
            u = inverse_path(t, q, w)
            g, end = transduce(t, q, w + u)
            assert end == q
            assert g == identity(t.width)
            assert len(w + u) % rep.d == 0


def test_reordering_is_undone_by_analysis(custom_results):
    res = custom_results["wide2"]
    t = res.transducer
    twisted = reorder(t, [ID3, res.report.g0_prime])
    assert twisted.states != t.states
    res2 = analyze(twisted)
    assert res2.transducer.states == t.states
    assert res2.transducer.lam == t.lam
    for field in ("s0", "d_matrix", "g0_prime", "d_prime", "K"):
        assert getattr(res2.report, field) == getattr(res.report, field)


def test_report_dict_is_json_ready(all_results):
    for name, res in all_results.items():
        doc = json.loads(json.dumps(res.report.as_dict()))
        assert doc["d"] == res.report.d
        assert doc["group_order"] == res.report.group_order
        assert len(doc["s0"]) == len(res.report.G)


@st.composite
def sc_automata(draw):
    k = draw(st.integers(2, 3))
    n = draw(st.integers(1, 4))
    delta = tuple(
        tuple(draw(st.integers(0, n - 1)) for _ in range(k)) for _ in range(n)
    )
    a = make_dfao(k, delta)
    assume(is_strongly_connected(a))
    return a


@given(sc_automata())
@settings(max_examples=40)
def test_random_automata_verify(a):
    res = analyze(a)
    relations(res)
    depth = 7 if a.k == 2 else 6
    checks = verify_structure(res, depth)
    assert all(checks.values()), (a.delta, checks)


def test_analysis_from_prebuilt_transducer(ex):
    t = build_naturally_induced(ex["six_state"])
    res = analyze(t)
    assert res.report.d == 2
    assert res.automaton is ex["six_state"]

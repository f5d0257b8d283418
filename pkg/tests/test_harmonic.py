"""Fourier averages over digit blocks, decay fits, carries, and prime
residuals.

The recurrence evaluator is checked against direct enumeration; decay
exponents and carry counts are checked against frozen values from runs
that were verified with the direct method.
"""

from math import log

import numpy as np
import pytest
import sympy

from autperm import (
    abelian_character,
    analyze,
    carry_eta,
    carry_violation_count,
    decay_fit,
    phi,
    prime_fourier_residual,
    psi,
    reduce_to_special,
    regular_indicator,
    sign_character,
    value_class_character,
)
from autperm.automaton import digits_of
from autperm.transducer import transduce

from .conftest import make_dfao

ID2, SW = (0, 1), (1, 0)

TS = (0.1371, 0.5, 0.80902)


@pytest.fixture(scope="module")
def mod3r(ex):
    _, sq = reduce_to_special(ex["mod3_residue"])
    return analyze(sq)


def rep_cases(results, mod3r):
    return [
        ("tm-sign", results["thue_morse"], sign_character(results["thue_morse"])),
        ("rs-reg", results["rudin_shapiro"],
         regular_indicator(results["rudin_shapiro"])),
        ("five-reg", results["five_state"],
         regular_indicator(results["five_state"])),
        ("mod3r-char", mod3r, value_class_character(mod3r, 1)),
        ("mod3r-reg", mod3r, regular_indicator(mod3r)),
    ]


def test_recurrence_matches_direct_enumeration(results, mod3r):
    for name, res, rep in rep_cases(results, mod3r):
        t = res.transducer
        for lam in (0, 2, 5):
            for alpha, r in ((0, 0), (2, 1), (2, t.k**2 - 1)):
                for q in (0, t.n - 1):
                    for tval in TS:
                        a = psi(t, rep, q, lam, alpha, tval, r=r)
                        b = psi(
                            t, rep, q, lam, alpha, tval, r=r, method="direct"
                        )
                        diff = np.abs(a.matrix - b.matrix).max()
                        assert diff < 1e-10, (name, lam, alpha, r, q, tval)


def test_average_is_periodic_in_t(results):
    res = results["rudin_shapiro"]
    rep = regular_indicator(res)
    t = res.transducer
    for tval in TS:
        a = psi(t, rep, 0, 6, 0, tval)
        b = psi(t, rep, 0, 6, 0, tval + 1.0)
        assert np.abs(a.matrix - b.matrix).max() < 1e-12


def test_averages_are_contractions(results):
    for name, rep_of in (
        ("thue_morse", sign_character),
        ("rudin_shapiro", regular_indicator),
    ):
        res = results[name]
        rep = rep_of(res)
        for tval in np.linspace(0.05, 0.95, 7):
            fv = psi(res.transducer, rep, 0, 7, 0, float(tval))
            assert fv.norm2 <= 1 + 1e-9


def test_sign_average_vanishes_at_zero(results):
    res = results["thue_morse"]
    rep = sign_character(res)
    for lam in range(1, 9):
        assert psi(res.transducer, rep, 0, lam, 0, 0.0).norm2 < 1e-15


def test_value_class_characters_are_orthonormal(mod3r):
    chars = value_class_character(mod3r, 0).chars
    gram = chars @ chars.conj().T / chars.shape[1]
    assert np.abs(gram - np.eye(3)).max() < 1e-12


def test_walk_value_class_tracks_the_input(results, mod3r):
    # With period and step both 1, the value class of the walk weight is
    # the input residue itself.
    for res in (mod3r, results["base3_component"]):
        t = res.transducer
        dp = res.report.d_prime
        s0 = res.report.s0
        for n in range(500):
            g, _ = transduce(t, t.initial, digits_of(n, t.k))
            assert s0[g] == n % dp


def test_abelian_character_validation(results):
    res = results["thue_morse"]
    with pytest.raises(ValueError, match="cover exactly"):
        abelian_character(res, {ID2: 1.0})
    with pytest.raises(ValueError, match="modulus 1"):
        abelian_character(res, {ID2: 1.0, SW: 2.0})
    with pytest.raises(ValueError, match="not multiplicative"):
        abelian_character(res, {ID2: -1.0, SW: 1.0})
    rep = abelian_character(res, {ID2: 1.0, SW: -1.0})
    assert rep.value_index is None and rep.dim == 1


def test_character_index_range(mod3r):
    with pytest.raises(ValueError, match="lie in"):
        value_class_character(mod3r, 3)


def test_decay_fit_rejects_invariant_representations(results):
    tm = results["thue_morse"]
    with pytest.raises(ValueError, match="value-class characters have no decay"):
        decay_fit(tm.transducer, value_class_character(tm, 0), [8, 10])

    b3 = results["base3_component"]
    with pytest.raises(ValueError, match="coincides with value class 1"):
        decay_fit(b3.transducer, sign_character(b3), [8, 10])

    six = results["six_state"]
    with pytest.raises(ValueError, match="reduce"):
        decay_fit(six.transducer, regular_indicator(six), [8, 10])


def test_unreduced_weights_leave_the_group(results):
    six = results["six_state"]
    rep = sign_character(six)
    with pytest.raises(ValueError, match="not defined on all step weights"):
        psi(six.transducer, rep, 0, 4, 0, 0.3)


def test_decay_fit_sign_character(results):
    res = results["thue_morse"]
    fit = decay_fit(res.transducer, sign_character(res), range(8, 17),
                    grid_size=2048)
    assert 0.15 < fit.eta_hat < 0.28
    assert fit.r2 > 0.9
    assert fit.kind == "abelian"
    assert all(a > b for a, b in zip(fit.sup_norms, fit.sup_norms[1:]))


def test_decay_fit_indicator_residual(results):
    res = results["rudin_shapiro"]
    fit = decay_fit(res.transducer, regular_indicator(res), range(8, 15),
                    grid_size=1024)
    assert 0.35 < fit.eta_hat < 0.6
    assert fit.r2 > 0.9
    assert fit.kind == "regular"


def test_decay_fit_without_refinement(results):
    res = results["thue_morse"]
    fit = decay_fit(res.transducer, sign_character(res), [8, 10, 12],
                    grid_size=512, refine=False)
    assert fit.eta_hat > 0.1
    assert len(fit.sup_norms) == 3


def test_decay_fit_argument_validation(results):
    res = results["thue_morse"]
    rep = sign_character(res)
    with pytest.raises(ValueError, match="two levels"):
        decay_fit(res.transducer, rep, [8])
    with pytest.raises(ValueError, match="nonnegative"):
        decay_fit(res.transducer, rep, [-1, 8])


def test_unpadded_average_of_trivial_character_is_one(results):
    res = results["thue_morse"]
    rep = value_class_character(res, 0)
    fv = phi(res.transducer, rep, 0, 6, 0, 0.0)
    assert fv.norm2 == pytest.approx(1.0, abs=1e-12)
    assert fv.bound_holds


def test_unpadded_average_at_level_zero(results):
    res = results["thue_morse"]
    fv = phi(res.transducer, sign_character(res), 0, 0, 2, 0.37, r=3)
    assert fv.norm2 == pytest.approx(1.0, abs=1e-12)


def test_unpadded_bound_holds(results):
    for name, rep_of in (
        ("thue_morse", sign_character),
        ("rudin_shapiro", regular_indicator),
    ):
        res = results[name]
        rep = rep_of(res)
        for lam in (4, 8):
            for alpha in (0, 2):
                for r in (0, 3):
                    for tval in (0.1371, 0.61803):
                        fv = phi(res.transducer, rep, 0, lam, alpha, tval, r=r)
                        assert fv.bound_holds, (name, lam, alpha, r, tval)


def test_unpadded_average_caps(results):
    res = results["thue_morse"]
    with pytest.raises(ValueError, match="caps the level"):
        phi(res.transducer, sign_character(res), 0, 23, 0, 0.3)


def test_padded_average_caps_and_validation(results):
    res = results["thue_morse"]
    rep = sign_character(res)
    t = res.transducer
    with pytest.raises(ValueError, match="direct mode caps"):
        psi(t, rep, 0, 21, 0, 0.3, method="direct")
    with pytest.raises(ValueError, match="recurrence"):
        psi(t, rep, 0, 4, 0, 0.3, method="fft")
    with pytest.raises(ValueError, match="nonnegative"):
        psi(t, rep, 0, -1, 0, 0.3)
    with pytest.raises(ValueError, match="residue must satisfy"):
        psi(t, rep, 0, 4, 1, 0.3, r=2)
    with pytest.raises(ValueError, match="no such transducer state"):
        psi(t, rep, 5, 4, 0, 0.3)


CARRY_ETAS = {
    "thue_morse": 1.0,
    "rudin_shapiro": 1.0,
    "five_state": log(4 / 3) / log(4),
    "six_state": 1.0,
    "mod3_residue": 1.0,
}


@pytest.mark.parametrize("name", sorted(CARRY_ETAS))
def test_carry_exponents(name, results):
    assert carry_eta(results[name].transducer) == pytest.approx(
        CARRY_ETAS[name], abs=1e-12
    )


def test_carry_counts_rudin_shapiro(results):
    t = results["rudin_shapiro"].transducer
    for rho in range(8):
        assert carry_violation_count(t, 8, 3, rho) == 2 ** (8 - rho)


def test_carry_counts_five_state(results):
    t = results["five_state"].transducer
    counts = [carry_violation_count(t, 8, 2, rho) for rho in range(8)]
    assert counts == [256, 255, 211, 147, 91, 55, 27, 15]


def test_carry_counts_decrease(results):
    t = results["thue_morse"].transducer
    counts = [carry_violation_count(t, 8, 1, rho) for rho in range(8)]
    assert all(a >= b for a, b in zip(counts, counts[1:]))
    assert counts[-1] < counts[0] <= 2**8


def test_trivial_weights_never_violate():
    a = make_dfao(2, ((1, 0), (2, 1), (3, 2), (0, 0)))
    t = analyze(a).transducer
    assert t.width == 1
    for rho in (1, 3):
        assert carry_violation_count(t, 6, 2, rho) == 0


def test_carry_count_validation(results):
    t = results["thue_morse"].transducer
    with pytest.raises(ValueError, match="rho < lam"):
        carry_violation_count(t, 4, 2, 4)
    with pytest.raises(ValueError, match="nonnegative"):
        carry_violation_count(t, 4, -1, 1)
    with pytest.raises(ValueError, match="exceeds the cap"):
        carry_violation_count(t, 28, 0, 1)


def test_prime_residuals_decay(ex):
    pf = prime_fourier_residual(ex["thue_morse"], [6, 8, 10], grid=128)
    assert pf.base == 2 and pf.reduction_power == 1
    assert pf.prime_counts == tuple(
        sympy.primepi(2**nu - 1) for nu in (6, 8, 10)
    )
    assert all(a > b for a, b in zip(pf.sup_norms, pf.sup_norms[1:]))
    # The t = 0 column is the projected weight histogram.
    ng = len(pf.elements)
    for i, nu in enumerate(pf.nus):
        v = pf.weight_counts[i].astype(np.complex128) / 2.0**nu
        want = v - pf.characters.T @ (pf.characters.conj() @ v) / ng
        assert np.abs(pf.t0_residuals[i] - want).max() < 1e-12


def test_prime_residuals_after_reduction(ex):
    pf = prime_fourier_residual(ex["mod3_residue"], [4, 6], grid=64)
    assert pf.base == 4 and pf.reduction_power == 2
    assert pf.d_prime == 3 and len(pf.elements) == 3
    assert pf.prime_counts == (sympy.primepi(255), sympy.primepi(4095))
    assert pf.sup_norms[0] > pf.sup_norms[1]


def test_prime_residual_validation(ex):
    with pytest.raises(ValueError, match="strongly connected"):
        prime_fourier_residual(ex["base3_nonsync"], [4])
    with pytest.raises(ValueError, match="positive"):
        prime_fourier_residual(ex["thue_morse"], [0, 4])
    with pytest.raises(ValueError, match="exceeds the cap"):
        prime_fourier_residual(ex["thue_morse"], [25])

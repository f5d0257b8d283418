"""Fourier behavior of transducer weights over digit blocks.

Averages of the form (1/k^L) * sum_u D(T(q, u-block r-block)) e(-ut)
admit a level recurrence because peeling the most significant digit of
u splits the walk weight into a one-step factor times a shorter walk.
This module evaluates those averages (with a brute-force oracle), fits
their decay rate in L, counts how often low-digit truncation changes a
weight quotient, and measures the same kind of average over primes.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, log

import numpy as np

from .automaton import Dfao, digits_of
from .numbertheory import SieveTables, sieve
from .perms import GroupTable, Perm, identity
from .structure import StructureResult, compute_l0, reduce_to_special, analyze
from .transducer import InducedTransducer, _BatchTables, batch_weight_state, weight_group

DIRECT_PSI_CAP = 1 << 20
DIRECT_PHI_CAP = 1 << 22
PHI_LEVEL_CAP = 22
CARRY_CAP = 10**8
PRIME_GRID_CAP = 1 << 24


def _e(x) -> np.ndarray:
    # e(-x) with the argument reduced mod 1 first, so huge phases such
    # as u*k^j*t keep full precision.
    return np.exp(-2j * np.pi * np.mod(x, 1.0))


def _perm_sign(p: Perm) -> int:
    seen = [False] * len(p)
    sign = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class RepresentationSpec:
    """A unitary representation given by explicit matrices per element.

    kind is one of "value_class" (the one-dimensional character
    e(ell*s0(g)/d') read off the walk-value class of g), "abelian"
    (any explicit multiplicative character), or "regular" (the
    permutation action of the weight group on itself, whose identity
    column realizes the element-indicator vector).  value_index is set
    when a one-dimensional character coincides with a value-class
    character; such characters have no decay and are rejected by
    decay_fit.  chars holds the d' value-class characters (one row per
    class, columns ordered like elements) used to project the regular
    indicator; it is present only when the weight group itself is the
    length-invariant subgroup (period 1) so the value classes cover it.
    """

    kind: str
    elements: tuple[Perm, ...]
    dim: int
    matrices: dict[Perm, np.ndarray]
    d_prime: int
    value_index: int | None
    chars: np.ndarray | None
    special: bool


def _value_chars(elements, s0, d_prime) -> np.ndarray:
    phases = np.array([s0[g] for g in elements], dtype=np.float64) / d_prime
    ells = np.arange(d_prime)[:, None]
    return np.exp(2j * np.pi * ells * phases[None, :])


def _match_value_index(values, chars) -> int | None:
    for ell in range(chars.shape[0]):
        if np.max(np.abs(values - chars[ell])) < 1e-9:
            return int(ell)
    return None


def value_class_character(res: StructureResult, ell: int) -> RepresentationSpec:
    """Character g -> e(ell * s0(g) / d') on the length-invariant group."""
    rep = res.report
    if not 0 <= ell < rep.d_prime:
        raise ValueError("character index must lie in [0, d')")
    chars = _value_chars(rep.G, rep.s0, rep.d_prime)
    mats = {g: chars[ell, i].reshape(1, 1) for i, g in enumerate(rep.G)}
    return RepresentationSpec(
        kind="value_class",
        elements=tuple(rep.G),
        dim=1,
        matrices=mats,
        d_prime=rep.d_prime,
        value_index=ell,
        chars=chars,
        special=rep.d == 1 and rep.k0 == 1,
    )


def abelian_character(res: StructureResult, table: dict[Perm, complex]) -> RepresentationSpec:
    """Validate and wrap an explicit one-dimensional character of G."""
    rep = res.report
    gt = GroupTable(rep.G)
    if set(table) != set(rep.G):
        raise ValueError("character table must cover exactly the weight group")
    vals = np.array([table[g] for g in gt.elements], dtype=np.complex128)
    if np.max(np.abs(np.abs(vals) - 1.0)) > 1e-9:
        raise ValueError("character values must have modulus 1")
    for i in range(len(gt.elements)):
        for j in range(len(gt.elements)):
            if abs(vals[gt.mul[i][j]] - vals[i] * vals[j]) > 1e-9:
                raise ValueError("character table is not multiplicative")
    chars = _value_chars(gt.elements, rep.s0, rep.d_prime)
    mats = {g: vals[i].reshape(1, 1) for i, g in enumerate(gt.elements)}
    return RepresentationSpec(
        kind="abelian",
        elements=gt.elements,
        dim=1,
        matrices=mats,
        d_prime=rep.d_prime,
        value_index=_match_value_index(vals, chars),
        chars=chars,
        special=rep.d == 1 and rep.k0 == 1,
    )


def sign_character(res: StructureResult) -> RepresentationSpec:
    """The permutation-parity character of the weight group."""
    return abelian_character(res, {g: complex(_perm_sign(g)) for g in res.report.G})


def regular_indicator(res: StructureResult) -> RepresentationSpec:
    """Left-translation permutation matrices of the full weight group.

    Applying the resulting averages to the identity basis vector gives
    the element-indicator realization: column id of the matrix average
    is the vector of per-element exponential sums.
    """
    rep = res.report
    gt = weight_group(res.transducer)
    n = len(gt.elements)
    mats = {}
    for i, g in enumerate(gt.elements):
        m = np.zeros((n, n), dtype=np.complex128)
        for j in range(n):
            m[gt.mul[i][j], j] = 1.0
        mats[g] = m
    chars = None
    if rep.d == 1:
        chars = _value_chars(gt.elements, rep.s0, rep.d_prime)
    return RepresentationSpec(
        kind="regular",
        elements=gt.elements,
        dim=n,
        matrices=mats,
        d_prime=rep.d_prime,
        value_index=None,
        chars=chars,
        special=rep.d == 1 and rep.k0 == 1,
    )


@dataclass(frozen=True)
class FourierValue:
    matrix: np.ndarray
    norm2: float
    bound: float | None = None
    bound_holds: bool | None = None


def _spectral(m: np.ndarray) -> float:
    if m.shape == (1, 1):
        return float(abs(m[0, 0]))
    return float(np.linalg.norm(m, ord=2))


def _generator_matrices(t: InducedTransducer, rep: RepresentationSpec) -> np.ndarray:
    out = np.empty((t.n, t.k, rep.dim, rep.dim), dtype=np.complex128)
    for q in range(t.n):
        for a in range(t.k):
            m = rep.matrices.get(t.lam[q][a])
            if m is None:
                raise ValueError(
                    "representation is not defined on all step weights; "
                    "weights leave the length-invariant group when the "
                    "period exceeds 1, reduce the automaton first"
                )
            out[q, a] = m
    return out


def _base_matrices(t, dlam, alpha: int, r: int, dim: int) -> np.ndarray:
    """D(T(q, r-block)) for every q, r written with exactly alpha digits."""
    word = digits_of(r, t.k)
    word = [0] * (alpha - len(word)) + list(word)
    base = np.broadcast_to(np.eye(dim, dtype=np.complex128), (t.n, dim, dim)).copy()
    for q in range(t.n):
        s = q
        for dgt in word:
            base[q] = base[q] @ dlam[s, dgt]
            s = t.delta[s][dgt]
    return base


def _psi_levels(t, dlam, base, lam_max: int, tval: float) -> list[np.ndarray]:
    """Per-state averages at one t for every level 0..lam_max."""
    levels = [base]
    cur = base
    scale = 1.0
    for j in range(1, lam_max + 1):
        phases = _e(np.arange(t.k) * scale * tval)
        nxt = np.zeros_like(cur)
        for q in range(t.n):
            acc = nxt[q]
            for eps in range(t.k):
                acc += phases[eps] * (dlam[q, eps] @ cur[t.delta[q][eps]])
            nxt[q] = acc / t.k
        levels.append(nxt)
        cur = nxt
        scale *= t.k
    return levels


def _validate_psi_args(t, lam, alpha, r, q):
    if lam < 0 or alpha < 0:
        raise ValueError("block lengths must be nonnegative")
    if not 0 <= r < t.k**alpha:
        raise ValueError("residue must satisfy 0 <= r < k^alpha")
    if not 0 <= q < t.n:
        raise ValueError("no such transducer state")


def psi(
    t: InducedTransducer,
    rep: RepresentationSpec,
    q: int,
    lam: int,
    alpha: int,
    tval: float,
    r: int = 0,
    method: str = "recurrence",
) -> FourierValue:
    """(1/k^lam) sum over u < k^lam of D(T(q, u r-block)) e(-ut).

    u is written with exactly lam digits and r with exactly alpha, so
    every term walks the same word length.  The recurrence peels one
    most significant digit per level; the direct method enumerates all
    u and exists as a cross-check oracle.
    """
    _validate_psi_args(t, lam, alpha, r, q)
    dlam = _generator_matrices(t, rep)
    base = _base_matrices(t, dlam, alpha, r, rep.dim)
    if method == "recurrence":
        m = _psi_levels(t, dlam, base, lam, tval)[lam][q]
    elif method == "direct":
        if t.k**lam > DIRECT_PSI_CAP:
            raise ValueError("direct mode caps k^lam at %d" % DIRECT_PSI_CAP)
        m = _psi_direct(t, rep, dlam, base, q, lam, tval)
    else:
        raise ValueError("method must be 'recurrence' or 'direct'")
    return FourierValue(matrix=m, norm2=_spectral(m))


def _psi_direct(t, rep, dlam, base, q, lam, tval):
    k = t.k
    us = np.arange(k**lam, dtype=np.int64)
    gidx = np.zeros(len(us), dtype=np.int32)
    sidx = np.full(len(us), q, dtype=np.int32)
    bt = _BatchTables(t)
    for pos in range(lam):
        d = ((us // k ** (lam - 1 - pos)) % k).astype(np.int32)
        gidx = bt.mul[gidx, bt.lam_idx[sidx, d]]
        sidx = bt.delta[sidx, d]
    dstack = np.stack([rep.matrices[g] for g in bt.table.elements])
    phases = _e(us * tval)
    # The r-block part depends on the reached state, not on u's weight,
    # so fold it in per final state.
    total = np.zeros((rep.dim, rep.dim), dtype=np.complex128)
    for s in range(t.n):
        mask = sidx == s
        if not mask.any():
            continue
        terms = phases[mask, None, None] * dstack[gidx[mask]]
        total += terms.sum(axis=0) @ base[s]
    return total / k**lam


def _weights_from(t, bt, ns: np.ndarray, start: int) -> np.ndarray:
    """Walk weights of (n)_k read from an arbitrary state."""
    k = t.k
    g = np.zeros(len(ns), dtype=np.int32)
    s = np.full(len(ns), start, dtype=np.int32)
    nmax = int(ns.max()) if len(ns) else 0
    length = len(digits_of(nmax, k)) if nmax > 0 else 0
    bounds = np.array([k**i for i in range(length + 1)], dtype=np.int64)
    digit_len = np.searchsorted(bounds, ns, side="right").astype(np.int64)
    for pos in range(length):
        active = digit_len > pos
        if not active.any():
            continue
        shift = digit_len[active] - 1 - pos
        d = ((ns[active] // k**shift) % k).astype(np.int32)
        sa = s[active]
        g[active] = bt.mul[g[active], bt.lam_idx[sa, d]]
        s[active] = bt.delta[sa, d]
    return g


def phi(
    t: InducedTransducer,
    rep: RepresentationSpec,
    q: int,
    lam: int,
    alpha: int,
    tval: float,
    r: int = 0,
) -> FourierValue:
    """(1/k^lam) sum over u < k^lam of D(T(q, (u*k^alpha + r)_k)) e(-ut).

    Words here are the natural digit strings (no padding), so the word
    length varies with u and r may be arbitrary.  Evaluation is direct
    enumeration; the returned bound field carries the diagnostic
    majorant sum_{j>=1} (k-1) max_q' |psi_{lam-j}(t, r mod k^alpha)|
    / k^j + k^-lam, which the norm must not exceed.  Peeling the most
    significant digit of u leaves k-1 full padded sums (one per
    nonzero leading digit) plus two partial sums that recurse, hence
    the k-1 factor.
    """
    if lam < 0 or alpha < 0 or r < 0:
        raise ValueError("block lengths and residue must be nonnegative")
    if not 0 <= q < t.n:
        raise ValueError("no such transducer state")
    if lam > PHI_LEVEL_CAP or t.k**lam > DIRECT_PHI_CAP:
        raise ValueError(
            "direct mode caps the level at %d and k^lam at %d"
            % (PHI_LEVEL_CAP, DIRECT_PHI_CAP)
        )
    k = t.k
    dlam = _generator_matrices(t, rep)
    bt = _BatchTables(t)
    us = np.arange(k**lam, dtype=np.int64)
    ns = us * k**alpha + r
    gidx = _weights_from(t, bt, ns, q)
    dstack = np.stack([rep.matrices[g] for g in bt.table.elements])
    phases = _e(us * tval)
    m = (phases[:, None, None] * dstack[gidx]).sum(axis=0) / k**lam
    norm = _spectral(m)

    base = _base_matrices(t, dlam, alpha, r % k**alpha, rep.dim)
    levels = _psi_levels(t, dlam, base, max(lam - 1, 0), tval)
    bound = float(k) ** -lam
    for j in range(1, lam + 1):
        worst = max(_spectral(levels[lam - j][qq]) for qq in range(t.n))
        bound += (k - 1) * worst / k**j
    return FourierValue(
        matrix=m, norm2=norm, bound=bound, bound_holds=norm <= bound + 1e-9
    )


@dataclass(frozen=True)
class DecayFit:
    lambdas: tuple[int, ...]
    sup_norms: tuple[float, ...]
    eta_hat: float
    r2: float
    fit_lambdas: tuple[int, ...]
    intercept: float
    grid_size: int
    kind: str


FIT_MIN_LEVEL = 8
# Fractional grid offset.  An anchored grid is useless at high levels:
# for k = 2 every dyadic rational is an exact zero of the level-lam
# average once lam exceeds log2(grid), so t = m/grid reads pure
# roundoff.  Any rational offset fails the same way one level later;
# the golden fraction keeps k^j * t away from such degeneracies.
_OFFSET = (np.sqrt(5) - 1) / 2


def _golden_max(f, a: float, b: float, iters: int = 48) -> float:
    inv = (np.sqrt(5) - 1) / 2
    x1 = b - inv * (b - a)
    x2 = a + inv * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv * (b - a)
            f1 = f(x1)
    return max(f1, f2)


def _stats_over(t, dlam, base, want, ts, reduce_norms) -> dict[int, np.ndarray]:
    """Per-t statistic of the level average, for every level in want."""
    dim = base.shape[1]
    cur = np.broadcast_to(base[:, None], (t.n, len(ts), dim, dim)).copy()
    out: dict[int, np.ndarray] = {}
    if 0 in want:
        out[0] = reduce_norms(cur)
    scale = 1.0
    for j in range(1, max(want) + 1):
        nxt = np.zeros_like(cur)
        for q in range(t.n):
            acc = nxt[q]
            for eps in range(t.k):
                ph = _e(eps * scale * ts)
                acc += ph[:, None, None] * np.einsum(
                    "ab,tbc->tac", dlam[q, eps], cur[t.delta[q][eps]]
                )
            nxt[q] = acc / t.k
        cur = nxt
        scale *= t.k
        if j in want:
            out[j] = reduce_norms(cur)
    return out


def _zoom(t, dlam, base, lam, center, width, floor, reduce_norms,
          sub: int = 96, rounds: int = 6):
    """Repeated re-gridding of a shrinking window around a maximum."""
    lo, hi = center - width, center + width
    best = -1.0
    for _ in range(rounds):
        step = (hi - lo) / sub
        ts = lo + (np.arange(sub) + 0.5) * step
        vals = _stats_over(t, dlam, base, {lam}, ts, reduce_norms)[lam]
        i = int(vals.argmax())
        best = max(best, float(vals[i]))
        lo, hi = ts[i] - step, ts[i] + step
        if hi - lo < floor:
            break
    return best, (lo + hi) / 2, (hi - lo) / 2


def _reject_invariant_rep(rep: RepresentationSpec):
    if rep.kind == "value_class":
        raise ValueError(
            "value-class characters have no decay: the average is 1 at "
            "t = ell/d'"
        )
    if rep.dim == 1 and rep.value_index is not None:
        raise ValueError(
            "character coincides with value class %d and has no decay"
            % rep.value_index
        )
    if rep.kind == "regular":
        if rep.chars is None or not rep.special:
            raise ValueError(
                "indicator residual needs period 1 and step 1; reduce "
                "the automaton first"
            )


def decay_fit(
    t: InducedTransducer,
    rep: RepresentationSpec,
    lambdas,
    grid_size: int = 4096,
    alpha: int = 0,
    r: int = 0,
    refine: bool = True,
) -> DecayFit:
    """Sup over t of the level-lam average, fitted against lam.

    For one-dimensional characters the statistic is the modulus, taken
    over every start state.  For the regular indicator the identity
    column is taken and its value-class components are projected out
    first, so the residual isolates the part that is expected to decay.
    The sup is estimated on an offset uniform grid and then sharpened
    by window zooming plus a golden-section polish (see _OFFSET for why
    the grid must not be anchored at 0); the result is a certified
    lower bound on the true sup and empirically tight.  The fit is
    ordinary least squares of log_k(sup) against lam, ignoring levels
    below FIT_MIN_LEVEL (transient regime).
    """
    lambdas = tuple(sorted(set(int(x) for x in lambdas)))
    if not lambdas or lambdas[0] < 0:
        raise ValueError("levels must be nonnegative")
    _reject_invariant_rep(rep)
    if rep.dim > 1 and rep.kind != "regular":
        raise ValueError("only characters and the regular indicator are supported")
    _validate_psi_args(t, lambdas[-1], alpha, r, 0)
    dlam = _generator_matrices(t, rep)
    base = _base_matrices(t, dlam, alpha, r, rep.dim)
    id_col = rep.elements.index(identity(t.width))
    ng = len(rep.elements)

    def reduce_norms(mats: np.ndarray) -> np.ndarray:
        # mats: (n_states, n_t, dim, dim) -> per-t statistic
        if rep.kind == "regular":
            v = mats[..., id_col]
            coeffs = np.einsum("ntd,ld->ntl", v, rep.chars.conj()) / ng
            v = v - np.einsum("ntl,ld->ntd", coeffs, rep.chars)
            return np.linalg.norm(v, axis=2).max(axis=0)
        return np.abs(mats[..., 0, 0]).max(axis=0)

    ts0 = (np.arange(grid_size) + _OFFSET) / grid_size
    stats = _stats_over(t, dlam, base, set(lambdas), ts0, reduce_norms)
    sups = {lam: float(stats[lam].max()) for lam in lambdas}
    tops = {lam: np.argsort(stats[lam])[-8:] for lam in lambdas}

    if refine:
        # The grid only resolves features down to 1/grid_size, which is
        # far coarser than the level-lam features of width k^-lam.  The
        # candidate windows are therefore zoomed: the level's own best
        # grid points plus the best point of every lower level, since
        # maxima of deeper levels sit inside high regions of shallower
        # ones.
        w0 = 1.0 / grid_size
        for lam in lambdas:
            if lam == 0:
                continue
            cand = [int(i) for i in tops[lam]]
            cand += [int(tops[lp][-1]) for lp in lambdas if 0 < lp < lam]
            floor = t.k ** -float(lam) / 8
            best_v = sups[lam]
            best_c = float(ts0[int(stats[lam].argmax())])
            best_w = w0
            for i in sorted(set(cand)):
                v, c, w = _zoom(
                    t, dlam, base, lam, float(ts0[i]), w0, floor, reduce_norms
                )
                if v > best_v:
                    best_v, best_c, best_w = v, c, w

            def f(tv, _lam=lam):
                levels = _psi_levels(t, dlam, base, _lam, tv)
                return float(reduce_norms(levels[_lam][:, None])[0])

            sups[lam] = max(
                best_v, _golden_max(f, best_c - best_w, best_c + best_w)
            )

    sup_norms = tuple(sups[lam] for lam in lambdas)
    fit_lams = [lam for lam in lambdas if lam >= FIT_MIN_LEVEL]
    if len(fit_lams) < 2:
        raise ValueError("need at least two levels >= %d to fit" % FIT_MIN_LEVEL)
    xs = np.array(fit_lams, dtype=np.float64)
    ys = np.array(
        [log(max(sups[lam], 1e-300)) / log(t.k) for lam in fit_lams]
    )
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(((ys - pred) ** 2).sum())
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return DecayFit(
        lambdas=lambdas,
        sup_norms=sup_norms,
        eta_hat=float(-slope),
        r2=r2,
        fit_lambdas=tuple(fit_lams),
        intercept=float(intercept),
        grid_size=grid_size,
        kind=rep.kind,
    )


def carry_eta(t: InducedTransducer) -> float:
    """Expected truncation-violation exponent from the sync length."""
    l0 = compute_l0(t)
    if l0 == 0:
        return 1.0
    m = float(t.k**l0)
    return log(m / (m - 1.0)) / log(m)


def carry_violation_count(
    t: InducedTransducer, lam: int, alpha: int, rho: int, r: int = 0
) -> int:
    """Blocks whose weight quotients feel digits above position alpha+rho.

    Counts l < k^lam such that some n1, n2 < k^alpha gives
    T(l*k^alpha + n1 + n2 + r)^-1 T(l*k^alpha + n1 + r) a different
    value than the same expression with both arguments reduced modulo
    k^(alpha+rho) before the shift r is added.  T(n) is the weight of
    (n)_k from the initial state; comparison is at group level, which
    dominates every faithful matrix realization.
    """
    if not 0 <= rho < lam:
        raise ValueError("need 0 <= rho < lam")
    if alpha < 0 or r < 0:
        raise ValueError("alpha and r must be nonnegative")
    k = t.k
    if k ** (lam + 2 * alpha) > CARRY_CAP:
        raise ValueError("k^(lam+2*alpha) exceeds the cap %d" % CARRY_CAP)
    ka = k**alpha
    kp = k ** (alpha + rho)
    total = k**lam * ka
    bt = _BatchTables(t)
    g_all, _, _ = batch_weight_state(t, np.arange(total + ka - 1 + r), bt)
    g_all = g_all.astype(np.int16)
    mul = bt.mul
    inv = np.array(bt.table.inv, dtype=np.int32)

    seg = max(ka, (1 << 22) // max(ka, 1) * ka)
    bad = np.zeros(k**lam, dtype=bool)
    for start in range(0, total, seg):
        xs = np.arange(start, min(start + seg, total))
        xt = xs % kp
        viol = np.zeros(len(xs), dtype=bool)
        for n2 in range(ka):
            a1 = g_all[xs + r]
            a2 = g_all[xs + n2 + r]
            b1 = g_all[xt + r]
            b2 = g_all[(xs + n2) % kp + r]
            viol |= mul[inv[a2], a1] != mul[inv[b2], b1]
        bad[start // ka : start // ka + len(xs) // ka] |= viol.reshape(
            -1, ka
        ).any(axis=1)
    return int(bad.sum())


@dataclass(frozen=True)
class PrimeFourierResidual:
    """Indicator averages over primes below k^nu, value classes removed."""

    base: int
    reduction_power: int
    nus: tuple[int, ...]
    grid: int
    sup_norms: tuple[float, ...]
    t0_residuals: tuple[np.ndarray, ...]
    weight_counts: tuple[np.ndarray, ...]
    prime_counts: tuple[int, ...]
    elements: tuple[Perm, ...]
    d_prime: int
    characters: np.ndarray


def prime_fourier_residual(
    a: Dfao, nus, grid: int = 1024, tables: SieveTables | None = None
) -> PrimeFourierResidual:
    """Per-element sums e(-pt) over primes p < k^nu, projected.

    The automaton is first reduced so the weight group equals the
    length-invariant group; the element-indicator vector is averaged
    with weight 1/k^nu, evaluated exactly on the uniform grid via an
    FFT of the residue histogram, and the value-class character
    components are removed before taking norms.
    """
    nus = tuple(sorted(set(int(x) for x in nus)))
    if not nus or nus[0] < 1:
        raise ValueError("digit counts must be positive")
    power, ared = reduce_to_special(a)
    res = analyze(ared)
    rep = res.report
    if rep.d != 1 or rep.k0 != 1:
        raise ValueError("reduction did not reach period 1 and step 1")
    kr = ared.k
    span = kr ** nus[-1]
    if span > PRIME_GRID_CAP:
        raise ValueError("k^nu exceeds the cap %d" % PRIME_GRID_CAP)
    if tables is None or tables.limit < span - 1:
        tables = sieve(span)
    gt = weight_group(res.transducer)
    chars = _value_chars(gt.elements, rep.s0, rep.d_prime)
    ng = len(gt.elements)
    ps = tables.primes(hi=span)
    g_idx, _, _ = batch_weight_state(res.transducer, ps)

    sup_norms, t0s, wcounts, pcounts = [], [], [], []
    for nu in nus:
        m = int(np.searchsorted(ps, kr**nu))
        hist = np.zeros((ng, grid), dtype=np.float64)
        for g in range(ng):
            sel = ps[:m][g_idx[:m] == g]
            hist[g] = np.bincount(sel % grid, minlength=grid)
        w = np.fft.fft(hist, axis=1) / float(kr) ** nu
        coeffs = chars.conj() @ w / ng
        w -= chars.T @ coeffs
        norms = np.linalg.norm(w, axis=0)
        sup_norms.append(float(norms.max()))
        t0s.append(w[:, 0].copy())
        wcounts.append(hist.sum(axis=1).astype(np.int64))
        pcounts.append(m)
    return PrimeFourierResidual(
        base=kr,
        reduction_power=power,
        nus=nus,
        grid=grid,
        sup_norms=tuple(sup_norms),
        t0_residuals=tuple(t0s),
        weight_counts=tuple(wcounts),
        prime_counts=tuple(pcounts),
        elements=gt.elements,
        d_prime=rep.d_prime,
        characters=chars,
    )

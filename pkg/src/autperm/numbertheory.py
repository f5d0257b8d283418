"""Sieves, Kloosterman sums, and prime/Moebius statistics of automatic
sequences.

The prediction side turns a structure report into expected letter
frequencies along the primes; the empirical side sieves, evaluates the
automaton over millions of indices in vectorized digit passes, and
measures how far reality is from the prediction (or from zero, for the
Moebius correlations).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .automaton import Dfao, is_strongly_connected
from .perms import Perm, inverse
from .structure import StabilizationError, StructureResult, analyze, reduce_to_special
from .transducer import InducedTransducer, batch_weight_state

SEGMENT = 1 << 20
STATIONARY_TOL = 1e-13
STATIONARY_CAP = 10**5


@dataclass(frozen=True)
class SieveTables:
    """Moebius values and primality flags for 0..limit inclusive."""

    limit: int
    mobius: np.ndarray
    is_prime: np.ndarray

    def mertens(self, x: int | None = None) -> int:
        x = self.limit if x is None else x
        return int(self.mobius[: x + 1].sum())

    def primes(
        self,
        lo: int = 0,
        hi: int | None = None,
        modulus: int | None = None,
        residue: int | None = None,
    ) -> np.ndarray:
        hi = self.limit + 1 if hi is None else min(hi, self.limit + 1)
        ps = np.flatnonzero(self.is_prime[:hi])
        ps = ps[ps >= lo]
        if modulus is not None:
            ps = ps[ps % modulus == residue]
        return ps


def sieve(n: int, segment: int = SEGMENT) -> SieveTables:
    """Segmented Moebius + primality sieve for 0..n inclusive."""
    if n < 2:
        raise ValueError("sieve limit must be at least 2")
    root = math.isqrt(n)
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for p in range(2, math.isqrt(root) + 1):
        if base[p]:
            base[p * p :: p] = False
    small_primes = np.flatnonzero(base)

    mobius = np.empty(n + 1, dtype=np.int8)
    is_prime = np.zeros(n + 1, dtype=bool)
    for lo in range(0, n + 1, segment):
        hi = min(lo + segment, n + 1)
        mu = np.ones(hi - lo, dtype=np.int8)
        rem = np.arange(lo, hi, dtype=np.int64)
        prime_flags = np.ones(hi - lo, dtype=bool)
        for p in small_primes:
            p = int(p)
            start = (-lo) % p
            prime_flags[start::p] = False
            mu[start::p] *= -1
            power = p
            while power <= hi - 1:
                s = (-lo) % power
                rem[s::power] //= p
                power *= p
            p2 = p * p
            if p2 <= hi - 1:
                mu[(-lo) % p2 :: p2] = 0
        mu[rem > 1] *= -1
        mobius[lo:hi] = mu
        # every multiple of a small prime was flagged composite; the
        # small primes themselves are repaired below
        is_prime[lo:hi] = prime_flags
    is_prime[small_primes] = True
    is_prime[:2] = False
    mobius[0] = 0
    return SieveTables(limit=n, mobius=mobius, is_prime=is_prime)


def kloosterman(a: int, b: int, c: int) -> complex:
    """S(a,b;c) = sum over x < c coprime to c of e((a*x + b*x^-1)/c)."""
    if c < 1:
        raise ValueError("modulus must be positive")
    if c == 1:
        return complex(1.0)
    re, im = [], []
    for x in range(1, c):
        if gcd(x, c) != 1:
            continue
        xinv = pow(x, -1, c)
        phase = 2.0 * math.pi * ((a * x + b * xinv) % c) / c
        re.append(math.cos(phase))
        im.append(math.sin(phase))
    return complex(math.fsum(re), math.fsum(im))


def _phi(n: int) -> int:
    out = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            out -= out // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out -= out // m
    return out


def batch_states(a: Dfao, ns: np.ndarray) -> np.ndarray:
    """End state of a run over (n)_k for every n, most significant digit
    first, vectorized one digit position per pass."""
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size and int(ns.min()) < 0:
        raise ValueError("indices must be nonnegative")
    delta = np.array(a.delta, dtype=np.int32)
    state = np.full(ns.shape, a.initial, dtype=np.int32)
    if not ns.size:
        return state
    k = a.k
    top = int(ns.max())
    length = 1
    while k**length <= top:
        length += 1
    bounds = np.array([k**i for i in range(length + 1)], dtype=np.int64)
    digit_len = np.searchsorted(bounds, ns, side="right")
    for pos in range(length, 0, -1):
        active = digit_len >= pos
        if not active.any():
            continue
        digit = (ns[active] // int(k ** (pos - 1))) % k
        state[active] = delta[state[active], digit]
    return state


def stationary_distribution(t: InducedTransducer) -> np.ndarray:
    """Stationary law of the uniform-digit chain on transducer states,
    by power iteration."""
    P = np.zeros((t.n, t.n))
    for q in range(t.n):
        for a in range(t.k):
            P[q, t.delta[q][a]] += 1.0 / t.k
    pi = np.full(t.n, 1.0 / t.n)
    for _ in range(STATIONARY_CAP):
        nxt = pi @ P
        if np.abs(nxt - pi).sum() < STATIONARY_TOL:
            return nxt
        pi = nxt
    raise StabilizationError("stationary distribution did not converge")


@dataclass(frozen=True)
class PrimePrediction:
    """Predicted letter frequencies along the prime subsequence."""

    f_g: dict[Perm, Fraction]
    f_q: dict[int, float]
    f_qb: dict[tuple[int, str], float]
    freq: dict[str, float]
    reduction_power: int
    result: StructureResult


def predict_prime_frequencies(a: Dfao) -> PrimePrediction:
    """Expected frequency of each letter over a_p for primes p.

    Pipeline: reduce so every walk-length and value period is 1, then
    combine the value-class density on G, the stationary end-state law,
    and a final coprime-digit step.
    """
    if not is_strongly_connected(a):
        raise ValueError("prediction requires a strongly connected automaton")
    if a.delta[a.initial][0] != a.initial:
        raise ValueError("prediction requires digit 0 to fix the initial state")
    power, reduced = reduce_to_special(a)
    res = analyze(reduced)
    rep = res.report
    if rep.d != 1 or rep.k0 != 1:
        raise RuntimeError("reduction failed to reach d = k0 = 1")
    t = res.transducer
    k = reduced.k

    dp = rep.d_prime
    weight = Fraction(dp, _phi(dp) * len(rep.G))
    f_g = {
        g: weight if gcd(rep.s0[g], dp) == 1 else Fraction(0)
        for g in rep.G
    }
    if sum(f_g.values()) != 1:
        raise RuntimeError("weight densities do not sum to 1")

    pi = stationary_distribution(t)
    f_q = {q: 0.0 for q in range(t.n)}
    coprime = [a0 for a0 in range(k) if gcd(a0, k) == 1]
    for a0 in coprime:
        for qp in range(t.n):
            f_q[t.delta[qp][a0]] += pi[qp] / len(coprime)

    out = reduced.output
    f_qb: dict[tuple[int, str], float] = {}
    labels = a.labels()
    for q in range(t.n):
        for b in labels:
            f_qb[(q, b)] = 0.0
        for g, fg in f_g.items():
            lbl = out[t.states[q][inverse(g)[0]]]
            f_qb[(q, lbl)] += float(fg)
    freq = {b: 0.0 for b in labels}
    for q in range(t.n):
        for b in labels:
            freq[b] += f_q[q] * f_qb[(q, b)]
    return PrimePrediction(
        f_g=f_g,
        f_q=f_q,
        f_qb=f_qb,
        freq=freq,
        reduction_power=power,
        result=res,
    )


@dataclass(frozen=True)
class EmpiricalPrimeFrequencies:
    frequencies: dict[str, float]
    weight_distribution: dict[Perm, float] | None
    count: int
    lo: int
    hi: int
    modulus: int | None = None
    residue: int | None = None


def empirical_prime_frequencies(
    a: Dfao,
    n: int,
    lo: int = 0,
    modulus: int | None = None,
    residue: int | None = None,
    tables: SieveTables | None = None,
    transducer: InducedTransducer | None = None,
) -> EmpiricalPrimeFrequencies:
    """Letter frequencies of a_p over primes p in [lo, n].

    When the automaton is strongly connected (or a transducer is passed
    in), the distribution of the walk weights over the same primes is
    reported as well.
    """
    tables = tables if tables is not None else sieve(n)
    ps = tables.primes(lo=lo, hi=n + 1, modulus=modulus, residue=residue)
    if not ps.size:
        raise ValueError("no primes in the requested range")
    states = batch_states(a, ps)
    counts = np.bincount(states, minlength=a.n)
    freqs = {b: 0.0 for b in a.labels()}
    for s, c in enumerate(counts):
        if c:
            freqs[a.output[s]] += c / ps.size

    wdist = None
    if transducer is None and is_strongly_connected(a):
        transducer = analyze(a).transducer
    if transducer is not None:
        g_idx, _s_idx, bt = batch_weight_state(transducer, ps)
        elems = bt.table.elements
        gcounts = np.bincount(g_idx, minlength=len(elems))
        wdist = {elems[i]: gcounts[i] / ps.size for i in range(len(elems))}
    return EmpiricalPrimeFrequencies(
        frequencies=freqs,
        weight_distribution=wdist,
        count=int(ps.size),
        lo=lo,
        hi=n,
        modulus=modulus,
        residue=residue,
    )


@dataclass(frozen=True)
class MobiusCorrelation:
    """Correlation sums over 1 <= n <= limit at one shift r.

    label_sums[b] = sum of mu(n) over n with a_{n+r} = b;
    label_counts[b] = plain count of those n; mertens = M(limit).
    embedded = (1/limit) * sum mu(n) * embed(a_{n+r}) when an embedding
    exists.
    """

    limit: int
    r: int
    label_sums: dict[str, int]
    label_counts: dict[str, int]
    mertens: int
    embedded: complex | None

    def correlation(self, b: str) -> float:
        return self.label_sums[b] / self.limit

    def adjusted(self, b: str) -> float:
        """Correlation minus the label-density share of the Mertens
        drift, the quantity that must vanish for Moebius randomness."""
        dens = self.label_counts[b] / self.limit
        return self.label_sums[b] / self.limit - dens * self.mertens / self.limit


def mobius_correlation(
    a: Dfao,
    n: int,
    r: int,
    checkpoints=None,
    tables: SieveTables | None = None,
) -> list[MobiusCorrelation]:
    """MobiusCorrelation at every checkpoint (cumulative sums over
    1 <= m <= checkpoint), last checkpoint = n."""
    checkpoints = sorted(set(checkpoints or [])) + [n]
    checkpoints = sorted({c for c in checkpoints if 2 <= c <= n})
    tables = tables if tables is not None else sieve(n)
    states = batch_states(a, np.arange(1 + r, n + r + 1, dtype=np.int64))
    emb = None
    if a.embedding is not None:
        emb = np.array([a.embedding[a.output[s]] for s in range(a.n)])

    out: list[MobiusCorrelation] = []
    sums = np.zeros(a.n, dtype=np.int64)
    counts = np.zeros(a.n, dtype=np.int64)
    esum = 0.0 + 0.0j
    mert = 0
    prev = 0
    for cp in checkpoints:
        st = states[prev:cp]
        mu = tables.mobius[prev + 1 : cp + 1].astype(np.int64)
        per_state = np.bincount(st, weights=mu, minlength=a.n)
        sums += per_state.astype(np.int64)
        counts += np.bincount(st, minlength=a.n)
        mert += int(mu.sum())
        if emb is not None:
            esum += complex((per_state * emb).sum())
        prev = cp
        label_sums = {b: 0 for b in a.labels()}
        label_counts = {b: 0 for b in a.labels()}
        for s in range(a.n):
            label_sums[a.output[s]] += int(sums[s])
            label_counts[a.output[s]] += int(counts[s])
        out.append(
            MobiusCorrelation(
                limit=cp,
                r=r,
                label_sums=label_sums,
                label_counts=label_counts,
                mertens=mert,
                embedded=(esum / cp) if emb is not None else None,
            )
        )
    return out


@dataclass(frozen=True)
class WindowedMobiusSum:
    """The digit-window Moebius sum with the weight-indicator vector as
    the representation: one entry per (weight, end state) pair."""

    limit: int
    r: int
    lam1: int
    lam2: int
    b: int
    m: int
    nu: int
    terms: int
    pair_sums: dict[tuple[Perm, int], int]
    weight_vector: dict[Perm, int]
    label_sums: dict[str, int]

    @property
    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.weight_vector.values()))

    @property
    def pair_norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.pair_sums.values()))


def windowed_mobius_sum(
    a: Dfao,
    n: int,
    lam1: int,
    lam2: int,
    b: int,
    m: int,
    r: int,
    tables: SieveTables | None = None,
    result: StructureResult | None = None,
) -> WindowedMobiusSum:
    """Sum of mu(n) times the weight indicator of T(q0,(n+r)_k) over
    1 <= n <= limit with n = m mod k^lam2 and the top lam1 digits of
    (n+r) mod k^nu equal to (b)_k."""
    k = a.k
    nu = 1
    while k**nu <= n:
        nu += 1
    if lam1 < 0 or lam2 < 0 or lam1 + lam2 >= nu:
        raise ValueError("need lam1 + lam2 < nu (window smaller than range)")
    if not 0 <= b < k**lam1:
        raise ValueError("window index b must satisfy 0 <= b < k^lam1")
    if not 0 <= m < k**lam2:
        raise ValueError("residue m must satisfy 0 <= m < k^lam2")
    res = result if result is not None else analyze(a)
    t = res.transducer
    tables = tables if tables is not None else sieve(n)

    ns = np.arange(1, n + 1, dtype=np.int64)
    if lam2 > 0:
        ns = ns[ns % (k**lam2) == m]
    if lam1 > 0:
        width = k ** (nu - lam1)
        ns = ns[(ns + r - b * width) % (k**nu) < width]
    mu = tables.mobius[ns].astype(np.int64)
    keep = mu != 0
    ns, mu = ns[keep], mu[keep]
    g_idx, s_idx, bt = batch_weight_state(t, ns + r)
    elems = bt.table.elements
    ng = len(elems)
    pair = g_idx.astype(np.int64) * t.n + s_idx
    sums = np.bincount(pair, weights=mu, minlength=ng * t.n).astype(np.int64)

    pair_sums: dict[tuple[Perm, int], int] = {}
    weight_vector = {g: 0 for g in elems}
    label_sums = {lbl: 0 for lbl in a.labels()}
    out = t.automaton.output
    for gi in range(ng):
        g = elems[gi]
        j = inverse(g)[0]
        for q in range(t.n):
            v = int(sums[gi * t.n + q])
            if v:
                pair_sums[(g, q)] = v
            weight_vector[g] += v
            label_sums[out[t.states[q][j]]] += v
    return WindowedMobiusSum(
        limit=n,
        r=r,
        lam1=lam1,
        lam2=lam2,
        b=b,
        m=m,
        nu=nu,
        terms=int(ns.size),
        pair_sums=pair_sums,
        weight_vector=weight_vector,
        label_sums=label_sums,
    )

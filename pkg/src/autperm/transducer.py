"""Induced transducer construction for strongly connected DFAOs.

States are the minimal-image subsets written as ordered tuples; each edge
carries a permutation weight telling where every coordinate of the source
tuple lands in the target tuple.  Folding the weights along (n)_k and
acting on the final tuple recovers the original automaton's run, which is
what the rest of the package builds on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .automaton import (
    Dfao,
    digits_of,
    is_strongly_connected,
    subset_bfs,
)
from .perms import GroupTable, Perm, act, compose, identity, inverse, is_perm

Word = tuple[int, ...]


@dataclass(frozen=True)
class InducedTransducer:
    """Permutation-weighted transducer over the minimal-image tuples.

    delta[q][a] is the successor state index, lam[q][a] the permutation
    weight of that edge.  states[q] holds automaton state indices; the
    initial tuple carries the automaton's initial state in coordinate 0.
    """

    k: int
    width: int
    states: tuple[tuple[int, ...], ...]
    delta: tuple[tuple[int, ...], ...]
    lam: tuple[tuple[Perm, ...], ...]
    automaton: Dfao
    initial: int = 0

    @property
    def n(self) -> int:
        return len(self.states)

    def state_names(self, q: int) -> tuple[str, ...]:
        return tuple(self.automaton.states[i] for i in self.states[q])


def minimal_images(a: Dfao) -> tuple[int, list[frozenset[int]]]:
    """Size of the smallest image of the full state set under any word,
    together with every reachable subset of that size in BFS order."""
    full = frozenset(range(a.n))
    seen = []
    for subset, _depth, _word in subset_bfs(a.delta, a.k, full):
        seen.append(subset)
    n0 = min(len(s) for s in seen)
    return n0, [s for s in seen if len(s) == n0]


def build_naturally_induced(a: Dfao) -> InducedTransducer:
    """Construct the induced transducer of a strongly connected DFAO.

    The initial tuple lists the automaton's initial state first and the
    rest ascending; every other tuple is fully ascending.  Each weight is
    the inverse of the coordinate-to-position map, so that acting with the
    weight on the target tuple reproduces the coordinatewise images.
    """
    if not is_strongly_connected(a):
        raise ValueError("automaton is not strongly connected")
    n0, min_sets = minimal_images(a)
    first = next(s for s in min_sets if a.initial in s)
    init_tuple = (a.initial,) + tuple(sorted(first - {a.initial}))

    tuples: list[tuple[int, ...]] = [init_tuple]
    index: dict[frozenset[int], int] = {first: 0}
    delta: list[list[int]] = []
    lam: list[list[Perm]] = []
    qi = 0
    while qi < len(tuples):
        src = tuples[qi]
        drow = []
        lrow = []
        for d in range(a.k):
            images = tuple(a.delta[x][d] for x in src)
            key = frozenset(images)
            if len(key) != n0:
                raise RuntimeError("image of a minimal set lost a state")
            if key not in index:
                index[key] = len(tuples)
                tuples.append(tuple(sorted(key)))
            ti = index[key]
            target = tuples[ti]
            pos = tuple(target.index(x) for x in images)
            drow.append(ti)
            lrow.append(inverse(pos))
        delta.append(drow)
        lam.append(lrow)
        qi += 1
    return InducedTransducer(
        k=a.k,
        width=n0,
        states=tuple(tuples),
        delta=tuple(tuple(r) for r in delta),
        lam=tuple(tuple(r) for r in lam),
        automaton=a,
        initial=0,
    )


def transduce(t: InducedTransducer, q: int, w) -> tuple[Perm, int]:
    """Fold the edge weights along w from state q.

    Returns (T, end) where T is the left-to-right product of the weights
    and end the final state index.
    """
    g = identity(t.width)
    s = q
    for d in w:
        g = compose(g, t.lam[s][d])
        s = t.delta[s][d]
    return g, s


def reconstruct_output(t: InducedTransducer, n: int) -> str:
    """Recover a_n of the parent automaton from the transducer alone:
    run (n)_k from the initial state and read coordinate 0 of the weight
    acting on the final tuple."""
    g, s = transduce(t, t.initial, digits_of(n, t.k))
    state = act(g, t.states[s])[0]
    return t.automaton.output[state]


def reorder(t: InducedTransducer, sigmas) -> InducedTransducer:
    """Rewrite every state tuple by its own permutation.

    sigmas[q] acts on the coordinates of states[q]; the initial tuple must
    keep the automaton's initial state in coordinate 0.  Weights conjugate
    accordingly, so reconstruction is unchanged.
    """
    sigmas = [tuple(s) for s in sigmas]
    if len(sigmas) != t.n:
        raise ValueError("need one permutation per state")
    for s in sigmas:
        if not is_perm(s) or len(s) != t.width:
            raise ValueError("reorder entries must be width-sized permutations")
    new_states = tuple(act(sigmas[q], t.states[q]) for q in range(t.n))
    if new_states[t.initial][0] != t.automaton.initial:
        raise ValueError("initial tuple must keep the initial state first")
    new_lam = []
    for q in range(t.n):
        row = []
        for d in range(t.k):
            tq = t.delta[q][d]
            row.append(
                compose(compose(sigmas[q], t.lam[q][d]), inverse(sigmas[tq]))
            )
        new_lam.append(tuple(row))
    return InducedTransducer(
        k=t.k,
        width=t.width,
        states=new_states,
        delta=t.delta,
        lam=tuple(new_lam),
        automaton=t.automaton,
        initial=t.initial,
    )


def weight_group(t: InducedTransducer, cap: int = 10**6) -> GroupTable:
    """Group generated by all edge weights, as a dense multiplication
    table (identity at index 0)."""
    gens = {p for row in t.lam for p in row}
    return GroupTable.generated_by(sorted(gens), cap=cap)


@dataclass(frozen=True)
class InducedReport:
    """Outcome of the structural checks for an induced transducer."""

    width_uniform: bool
    initial_first_coordinate: bool
    weights_are_permutations: bool
    one_step_consistent: bool
    coordinates_distinct: bool
    states_not_equivalent: bool
    strongly_connected: bool
    synchronizing: bool
    group_order: int | None

    def ok(self) -> bool:
        return all(
            getattr(self, f)
            for f in (
                "width_uniform",
                "initial_first_coordinate",
                "weights_are_permutations",
                "one_step_consistent",
                "coordinates_distinct",
                "states_not_equivalent",
                "strongly_connected",
                "synchronizing",
            )
        )

    def as_dict(self) -> dict:
        d = {
            f: getattr(self, f)
            for f in (
                "width_uniform",
                "initial_first_coordinate",
                "weights_are_permutations",
                "one_step_consistent",
                "coordinates_distinct",
                "states_not_equivalent",
                "strongly_connected",
                "synchronizing",
            )
        }
        d["group_order"] = self.group_order
        return d


def verify_induced(t: InducedTransducer, group_cap: int = 10**6) -> InducedReport:
    """Check the defining properties of an induced transducer against its
    parent automaton, one named flag per property."""
    a = t.automaton
    width_uniform = all(len(s) == t.width for s in t.states)
    initial_first = (
        bool(t.states) and t.states[t.initial][0] == a.initial
    )
    weights_ok = all(
        is_perm(p) and len(p) == t.width for row in t.lam for p in row
    )
    one_step = True
    if weights_ok and width_uniform:
        for q in range(t.n):
            for d in range(t.k):
                images = tuple(a.delta[x][d] for x in t.states[q])
                target = t.states[t.delta[q][d]]
                if act(t.lam[q][d], target) != images:
                    one_step = False
    else:
        one_step = False
    distinct = all(len(set(s)) == len(s) for s in t.states)
    not_equiv = len({frozenset(s) for s in t.states}) == t.n
    sc = _transducer_strongly_connected(t)
    from .automaton import find_sync_word

    sync = find_sync_word(t) is not None
    order = None
    if weights_ok:
        try:
            order = len(weight_group(t, cap=group_cap).elements)
        except Exception:
            order = None
    return InducedReport(
        width_uniform=width_uniform,
        initial_first_coordinate=initial_first,
        weights_are_permutations=weights_ok,
        one_step_consistent=one_step,
        coordinates_distinct=distinct,
        states_not_equivalent=not_equiv,
        strongly_connected=sc,
        synchronizing=sync,
        group_order=order,
    )


def _transducer_strongly_connected(t: InducedTransducer) -> bool:
    def reach(start, rows):
        seen = {start}
        todo = [start]
        while todo:
            u = todo.pop()
            for v in rows[u]:
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
        return seen

    fwd = [list(r) for r in t.delta]
    if len(reach(0, fwd)) != t.n:
        return False
    bwd = [[] for _ in range(t.n)]
    for u in range(t.n):
        for v in t.delta[u]:
            bwd[v].append(u)
    return len(reach(0, bwd)) == t.n


def transducer_to_doc(t: InducedTransducer) -> dict:
    a = t.automaton
    return {
        "k": t.k,
        "width": t.width,
        "states": [list(t.state_names(q)) for q in range(t.n)],
        "initial": t.initial,
        "delta": [list(r) for r in t.delta],
        "weights": [[list(p) for p in row] for row in t.lam],
    }


def dump_transducer(t: InducedTransducer, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(transducer_to_doc(t), fh, indent=2)
        fh.write("\n")


class _BatchTables:
    """Dense index tables for vectorized runs over many inputs."""

    def __init__(self, t: InducedTransducer, table: GroupTable | None = None):
        self.t = t
        self.table = table if table is not None else weight_group(t)
        gi = self.table.index
        self.mul = np.array(self.table.mul, dtype=np.int32)
        self.delta = np.array(t.delta, dtype=np.int32)
        self.lam_idx = np.array(
            [[gi[p] for p in row] for row in t.lam], dtype=np.int32
        )
        # first_coord[g][q]: automaton state at coordinate 0 of g acting
        # on tuple q, i.e. states[q][inverse(g)[0]].
        inv0 = [self.table.elements[self.table.inv[g]][0]
                for g in range(len(self.table.elements))]
        st = np.array(t.states, dtype=np.int32)
        self.first_coord = st[:, inv0].T.copy()


def batch_weight_state(
    t: InducedTransducer, ns, table: GroupTable | None = None
):
    """Weights and end states for many inputs at once.

    Returns (g_idx, state_idx, tables): indices into tables.table.elements
    and t.states for each n, reading (n)_k from the initial state.
    """
    bt = table if isinstance(table, _BatchTables) else _BatchTables(t, table)
    ns = np.asarray(ns, dtype=np.int64)
    g = np.zeros(len(ns), dtype=np.int32)
    s = np.full(len(ns), t.initial, dtype=np.int32)
    if len(ns) == 0:
        return g, s, bt
    if int(ns.min()) < 0:
        raise ValueError("inputs must be nonnegative")
    k = t.k
    nmax = int(ns.max())
    length = len(digits_of(nmax, k)) if nmax > 0 else 0
    bounds = np.array([k**i for i in range(length + 1)], dtype=np.int64)
    digit_len = np.searchsorted(bounds, ns, side="right").astype(np.int64)
    # Each n is processed starting at its own most significant digit, so
    # shorter inputs never see padding zeros.
    for pos in range(length):
        active = digit_len > pos
        if not active.any():
            continue
        shift = digit_len[active] - 1 - pos
        d = ((ns[active] // k**shift) % k).astype(np.int32)
        sa = s[active]
        g[active] = bt.mul[g[active], bt.lam_idx[sa, d]]
        s[active] = bt.delta[sa, d]
    return g, s, bt


def reconstruct_many(t: InducedTransducer, ns, table=None) -> list[str]:
    """Vectorized reconstruct_output for a batch of inputs."""
    g, s, bt = batch_weight_state(t, ns, table)
    states = bt.first_coord[g, s]
    out = t.automaton.output
    return [out[i] for i in states]

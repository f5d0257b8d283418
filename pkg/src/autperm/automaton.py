"""DFAO core model: base-k digit codecs, runs, SCC/period analysis,
synchronizing words, and the power-automaton transform.

Conventions: digit words are most-significant-first, (0)_k is the empty
word, and states are handled as dense indices internally (names live at
the JSON boundary).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

Word = tuple[int, ...]

SUBSET_CAP = 1 << 20


class SchemaError(ValueError):
    """Automaton JSON does not match the documented format."""


class SubsetCapError(RuntimeError):
    """Subset-automaton search exceeded the visited-set cap."""


def digits_of(n: int, k: int) -> Word:
    """Digits of n in base k, most significant first, no leading zeros.

    digits_of(0, k) is the empty word.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if k < 2:
        raise ValueError("base must be at least 2")
    out = []
    while n:
        n, r = divmod(n, k)
        out.append(r)
    out.reverse()
    return tuple(out)


def fixed_digits(n: int, k: int, t: int) -> Word:
    """The unique length-t word whose value is congruent to n mod k^t."""
    if t < 0:
        raise ValueError("width must be nonnegative")
    out = [0] * t
    for i in range(t - 1, -1, -1):
        n, r = divmod(n, k)
        out[i] = r
    return tuple(out)


def value_of(w: Sequence[int], k: int) -> int:
    v = 0
    for d in w:
        if not 0 <= d < k:
            raise ValueError(f"digit {d} out of range for base {k}")
        v = v * k + d
    return v


@dataclass(frozen=True)
class Dfao:
    """Deterministic finite automaton with output.

    delta[q][a] is the successor index of state q under digit a; output[q]
    is the label of state q.  embedding optionally maps labels to complex
    values for correlation sums.
    """

    k: int
    states: tuple[str, ...]
    delta: tuple[tuple[int, ...], ...]
    initial: int
    output: tuple[str, ...]
    embedding: dict[str, complex] | None = None
    state_index: dict[str, int] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "state_index", {s: i for i, s in enumerate(self.states)}
        )

    @property
    def n(self) -> int:
        return len(self.states)

    def idx(self, q) -> int:
        return q if isinstance(q, int) else self.state_index[q]

    def labels(self) -> list[str]:
        out = []
        for lab in self.output:
            if lab not in out:
                out.append(lab)
        return out

    def restrict(self, states: Iterable, initial) -> "Dfao":
        """Sub-automaton on a delta-closed subset of states."""
        keep = sorted({self.idx(q) for q in states})
        pos = {old: new for new, old in enumerate(keep)}
        rows = []
        for old in keep:
            row = []
            for a in range(self.k):
                t = self.delta[old][a]
                if t not in pos:
                    raise ValueError(
                        f"state set not closed: {self.states[old]} leaves on digit {a}"
                    )
                row.append(pos[t])
            rows.append(tuple(row))
        return Dfao(
            k=self.k,
            states=tuple(self.states[i] for i in keep),
            delta=tuple(rows),
            initial=pos[self.idx(initial)],
            output=tuple(self.output[i] for i in keep),
            embedding=self.embedding,
        )


def run(a: Dfao, q, w: Sequence[int]) -> int:
    """Fold delta over w starting at q; returns the final state index."""
    s = a.idx(q)
    for d in w:
        s = a.delta[s][d]
    return s


def sequence_term(a: Dfao, n: int) -> str:
    """a_n, the output label after reading (n)_k from the initial state."""
    return a.output[run(a, a.initial, digits_of(n, a.k))]


def parse_automaton(doc) -> Dfao:
    """Validate and build a Dfao from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise SchemaError("top level must be a JSON object")
    required = {"k", "states", "initial", "transitions", "output"}
    allowed = required | {"embedding"}
    unknown = set(doc) - allowed
    if unknown:
        raise SchemaError(f"unknown keys: {sorted(unknown)}")
    missing = required - set(doc)
    if missing:
        raise SchemaError(f"missing keys: {sorted(missing)}")
    k = doc["k"]
    if not isinstance(k, int) or k < 2:
        raise SchemaError("k must be an integer >= 2")
    states = doc["states"]
    if (
        not isinstance(states, list)
        or not states
        or any(not isinstance(s, str) for s in states)
        or len(set(states)) != len(states)
    ):
        raise SchemaError("states must be a nonempty list of distinct names")
    index = {s: i for i, s in enumerate(states)}
    if doc["initial"] not in index:
        raise SchemaError(f"initial state {doc['initial']!r} not in states")
    trans = doc["transitions"]
    if not isinstance(trans, dict) or set(trans) != set(states):
        raise SchemaError("transitions must have exactly one row per state")
    rows = []
    for s in states:
        row = trans[s]
        if not isinstance(row, list) or len(row) != k:
            raise SchemaError(
                f"transitions[{s!r}] must list exactly {k} target states"
            )
        for a, t in enumerate(row):
            if t not in index:
                raise SchemaError(
                    f"transitions[{s!r}][{a}] target {t!r} not in states"
                )
        rows.append(tuple(index[t] for t in row))
    output = doc["output"]
    if not isinstance(output, dict) or set(output) != set(states):
        raise SchemaError("output must map every state to a label")
    labels = []
    for s in states:
        lab = output[s]
        if not isinstance(lab, str):
            raise SchemaError(f"output[{s!r}] must be a string label")
        labels.append(lab)
    embedding = None
    if "embedding" in doc:
        emb = doc["embedding"]
        if not isinstance(emb, dict):
            raise SchemaError("embedding must be an object")
        known = set(labels)
        embedding = {}
        for lab, val in emb.items():
            if lab not in known:
                raise SchemaError(f"embedding label {lab!r} is not an output label")
            if (
                not isinstance(val, list)
                or len(val) != 2
                or any(not isinstance(x, (int, float)) for x in val)
            ):
                raise SchemaError(f"embedding[{lab!r}] must be [re, im]")
            embedding[lab] = complex(val[0], val[1])
    return Dfao(
        k=k,
        states=tuple(states),
        delta=tuple(rows),
        initial=index[doc["initial"]],
        output=tuple(labels),
        embedding=embedding,
    )


def load_automaton(path) -> Dfao:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON: {e}") from e
    return parse_automaton(doc)


def automaton_to_doc(a: Dfao) -> dict:
    doc = {
        "k": a.k,
        "states": list(a.states),
        "initial": a.states[a.initial],
        "transitions": {
            s: [a.states[t] for t in a.delta[i]] for i, s in enumerate(a.states)
        },
        "output": {s: a.output[i] for i, s in enumerate(a.states)},
    }
    if a.embedding is not None:
        doc["embedding"] = {
            lab: [v.real, v.imag] for lab, v in a.embedding.items()
        }
    return doc


@dataclass(frozen=True)
class SccReport:
    components: tuple[tuple[int, ...], ...]
    final_flags: tuple[bool, ...]
    periods: tuple[int, ...]  # 0 when the component has no cycle at all

    def final_components(self) -> list[tuple[int, ...]]:
        return [c for c, f in zip(self.components, self.final_flags) if f]


def scc_decompose(a: Dfao) -> SccReport:
    """Tarjan SCCs with final flags and the period of each component."""
    n = a.n
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[tuple[int, ...]] = []
    counter = 0
    # Iterative Tarjan; the recursion depth would otherwise scale with |Q|.
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work.pop()
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for ai in range(pi, a.k):
                w = a.delta[v][ai]
                if index[w] == -1:
                    work.append((v, ai + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp)))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    comps.sort(key=lambda c: c[0])
    membership = {}
    for ci, comp in enumerate(comps):
        for q in comp:
            membership[q] = ci
    finals = []
    periods = []
    for comp in comps:
        inside = set(comp)
        final = all(a.delta[q][d] in inside for q in comp for d in range(a.k))
        finals.append(final)
        periods.append(_component_period(a, comp))
    return SccReport(tuple(comps), tuple(finals), tuple(periods))


def _component_period(a: Dfao, comp: Sequence[int]) -> int:
    """gcd of cycle lengths inside one SCC; 0 if it has no cycle."""
    inside = set(comp)
    level = {comp[0]: 0}
    order = [comp[0]]
    qi = 0
    while qi < len(order):
        u = order[qi]
        qi += 1
        for d in range(a.k):
            v = a.delta[u][d]
            if v in inside and v not in level:
                level[v] = level[u] + 1
                order.append(v)
    g = 0
    for u in comp:
        if u not in level:
            continue
        for d in range(a.k):
            v = a.delta[u][d]
            if v in inside and v in level:
                g = gcd(g, level[u] + 1 - level[v])
    return abs(g)


def is_strongly_connected(a: Dfao) -> bool:
    rep = scc_decompose(a)
    return len(rep.components) == 1


def _image(delta, subset: frozenset[int], d: int) -> frozenset[int]:
    return frozenset(delta[q][d] for q in subset)


def subset_bfs(delta, k: int, start: frozenset[int], cap: int = SUBSET_CAP):
    """Breadth-first walk of the subset automaton from `start`.

    Yields (subset, depth, word) in discovery order, shortest words first
    and digits in increasing order within a level, so results are
    deterministic.  Raises SubsetCapError past `cap` visited subsets.
    """
    seen = {start}
    frontier: list[tuple[frozenset[int], Word]] = [(start, ())]
    depth = 0
    while frontier:
        nxt = []
        for subset, word in frontier:
            yield subset, depth, word
            for d in range(k):
                img = _image(delta, subset, d)
                if img not in seen:
                    seen.add(img)
                    if len(seen) > cap:
                        raise SubsetCapError(
                            f"subset search exceeded {cap} visited sets"
                        )
                    nxt.append((img, word + (d,)))
        frontier = nxt
        depth += 1


def find_sync_word(av) -> Word | None:
    """Shortest word mapping every state to one state, or None.

    Accepts anything with `k` and an indexable `delta` table (a Dfao or an
    induced transducer).
    """
    n = len(av.delta)
    full = frozenset(range(n))
    for subset, _depth, word in subset_bfs(av.delta, av.k, full):
        if len(subset) == 1:
            return word
    return None


def power_automaton(a: Dfao, p: int) -> Dfao:
    """Same states over the alphabet {0,...,k^p - 1}; one step reads the
    length-p base-k expansion of the new digit."""
    if p < 1:
        raise ValueError("power must be positive")
    kp = a.k**p
    rows = []
    for q in range(a.n):
        rows.append(tuple(run(a, q, fixed_digits(d, a.k, p)) for d in range(kp)))
    return Dfao(
        k=kp,
        states=a.states,
        delta=tuple(rows),
        initial=a.initial,
        output=a.output,
        embedding=a.embedding,
    )

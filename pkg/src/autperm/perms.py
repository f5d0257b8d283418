"""Permutations on {0,...,n-1} as forward-map tuples, plus small-group tables.

A permutation p sends i to p[i].  Composition follows the action convention
(p∘q)·x = p·(q·x), and acting on a tuple places coordinate j at slot p[j].
"""

from __future__ import annotations

from typing import Iterable, Sequence

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_perm(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def compose(p: Perm, q: Perm) -> Perm:
    """p∘q: apply q first, then p."""
    return tuple(p[q[i]] for i in range(len(q)))


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def act(p: Perm, x: Sequence) -> tuple:
    """p·x, the tuple with (p·x)[p[j]] = x[j]."""
    out = [None] * len(x)
    for j, v in enumerate(x):
        out[p[j]] = v
    return tuple(out)


def perm_order(p: Perm) -> int:
    n = 1
    q = p
    ident = identity(len(p))
    while q != ident:
        q = compose(q, p)
        n += 1
    return n


def cycle_notation(p: Perm) -> str:
    """1-based cycle string, e.g. (1 2)(3 4); 'id' for the identity."""
    seen = [False] * len(p)
    parts = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            seen[i] = True
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j + 1)
            j = p[j]
        parts.append("(" + " ".join(str(c) for c in cyc) + ")")
    return "".join(parts) if parts else "id"


def closure(generators: Iterable[Perm], cap: int = 10**6) -> list[Perm]:
    """Group generated by `generators`, sorted, id first.

    Raises GroupSizeError past `cap` elements.
    """
    gens = [tuple(g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    n = len(gens[0])
    seen = {identity(n)}
    frontier = [identity(n)]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                gh = compose(g, h)
                if gh not in seen:
                    seen.add(gh)
                    nxt.append(gh)
                    if len(seen) > cap:
                        raise GroupSizeError(
                            f"generated group exceeds cap of {cap} elements"
                        )
        frontier = nxt
    return sorted(seen)


class GroupSizeError(RuntimeError):
    """Generated permutation group exceeds the configured size cap."""


class GroupTable:
    """A finite permutation group as an indexed element list.

    elements are sorted (id is always index 0 since the identity is the
    lexicographically least permutation), with dense product and inverse
    tables for O(1) arithmetic on indices.
    """

    def __init__(self, elements: Sequence[Perm]):
        self.elements: list[Perm] = sorted(tuple(e) for e in elements)
        self.index: dict[Perm, int] = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        if not self.elements or self.elements[0] != identity(len(self.elements[0])):
            raise ValueError("group must contain the identity")
        self.mul = [[0] * n for _ in range(n)]
        self.inv = [0] * n
        for i, g in enumerate(self.elements):
            for j, h in enumerate(self.elements):
                gh = compose(g, h)
                if gh not in self.index:
                    raise ValueError("element set is not closed under composition")
                self.mul[i][j] = self.index[gh]
        for i, g in enumerate(self.elements):
            gi = inverse(g)
            if gi not in self.index:
                raise ValueError("element set is not closed under inversion")
            self.inv[i] = self.index[gi]

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, p: Perm) -> bool:
        return tuple(p) in self.index

    def __iter__(self):
        return iter(self.elements)

    @classmethod
    def generated_by(cls, generators: Iterable[Perm], cap: int = 10**6) -> "GroupTable":
        return cls(closure(generators, cap=cap))


def coset(g: Perm, elems: Iterable[Perm], side: str = "right") -> frozenset[Perm]:
    """G·g (side='right') or g·G (side='left')."""
    if side == "right":
        return frozenset(compose(h, g) for h in elems)
    return frozenset(compose(g, h) for h in elems)

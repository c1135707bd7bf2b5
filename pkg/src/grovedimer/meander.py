"""Bilinear forms on partitions and pairings, and their Gram matrices."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .combinatorics import (
    OddEvenPairing,
    Partition,
    enumerate_odd_even_pairings,
    enumerate_partitions,
    enumerate_planar_pairings,
    enumerate_planar_partitions,
)
from . import exact


@dataclass(frozen=True)
class GramMatrix:
    row_labels: tuple
    col_labels: tuple
    entries: tuple[tuple[int, ...], ...]

    def entry(self, r, c) -> int:
        return self.entries[self._rindex[r]][self._cindex[c]]

    def __post_init__(self):
        object.__setattr__(self, "_rindex", {lab: i for i, lab in enumerate(self.row_labels)})
        object.__setattr__(self, "_cindex", {lab: i for i, lab in enumerate(self.col_labels)})

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_labels), len(self.col_labels)

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def determinant(self):
        return exact.det(self.entries)

    def to_json(self) -> dict:
        return {
            "rows": [str(x) for x in self.row_labels],
            "cols": [str(x) for x in self.col_labels],
            "entries": [list(r) for r in self.entries],
        }


class _DSU:
    def __init__(self, n):
        self.p = list(range(n + 1))

    def find(self, x):
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.p[ra] = rb
        return True


def form_t(sigma: Partition, tau: Partition) -> int:
    if sigma.n != tau.n:
        raise ValueError("partitions on different item sets")
    n = sigma.n
    if sigma.num_parts + tau.num_parts != n + 1:
        return 0
    dsu = _DSU(n)
    comps = n
    for p in (*sigma.parts, *tau.parts):
        for x in p[1:]:
            if dsu.union(p[0], x):
                comps -= 1
    return int(comps == 1)


def _perm_cycles(perm: Sequence[int]) -> int:
    # perm is 1-based values on positions 0..n-1
    n = len(perm)
    seen = [False] * n
    cycles = 0
    for i in range(n):
        if not seen[i]:
            cycles += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j] - 1
    return cycles


def cycle_count(rho: OddEvenPairing, tau: OddEvenPairing) -> int:
    """Number of cycles of rho^{-1} tau."""
    if rho.n != tau.n:
        raise ValueError("pairings of different sizes")
    r, t = rho.permutation(), tau.permutation()
    rinv = [0] * len(r)
    for i, v in enumerate(r):
        rinv[v - 1] = i + 1
    return _perm_cycles([rinv[t[i] - 1] for i in range(len(t))])


def form_q(rho: OddEvenPairing, tau: OddEvenPairing, q):
    return q ** cycle_count(rho, tau)


def form_q2(rho: OddEvenPairing, tau: OddEvenPairing) -> int:
    return 2 ** cycle_count(rho, tau)


def gram_t(n: int, *, extended: bool = False) -> GramMatrix:
    rows = enumerate_planar_partitions(n)
    cols = enumerate_partitions(n) if extended else rows
    return GramMatrix(tuple(rows), tuple(cols),
                      tuple(tuple(form_t(r, c) for c in cols) for r in rows))


def gram_2(n: int, *, extended: bool = False) -> GramMatrix:
    rows = enumerate_planar_pairings(n)
    cols = enumerate_odd_even_pairings(n) if extended else rows
    return GramMatrix(tuple(rows), tuple(cols),
                      tuple(tuple(form_q2(r, c) for c in cols) for r in rows))

"""Rewriting partitions and pairings into planar ones.

``rule1_rewrite`` follows the induction on the number of items: strip the
largest item, rewrite the rest, put the item back, then untangle the
"almost planar" results one crossing part at a time.  ``rule2_rewrite``
starts from the identity pairing and walks to the target through adjacent
swaps of even labels, untangling each asterisk that appears.

Both produce integer coefficients only.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Iterable, Mapping

from .combinatorics import (
    OddEvenPairing,
    Partition,
    enumerate_odd_even_pairings,
    enumerate_partitions,
    enumerate_planar_pairings,
    enumerate_planar_partitions,
    is_planar,
    permutation_sign,
    relative_sign,
)
from .errors import GroveDimerError


class FormalSum:
    """Integer combination of hashable labels (partitions or pairings)."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | Iterable | None = None):
        self._terms: dict = {}
        if terms is None:
            return
        items = terms.items() if isinstance(terms, Mapping) else terms
        for key, coeff in items:
            self.add(key, coeff)

    @classmethod
    def single(cls, key, coeff: int = 1) -> "FormalSum":
        return cls({key: coeff})

    def add(self, key, coeff: int) -> None:
        if not coeff:
            return
        v = self._terms.get(key, 0) + coeff
        if v:
            self._terms[key] = v
        else:
            self._terms.pop(key, None)

    def iadd(self, other: "FormalSum", scale: int = 1) -> "FormalSum":
        for k, v in other._terms.items():
            self.add(k, scale * v)
        return self

    def __add__(self, other):
        return FormalSum(self._terms).iadd(other)

    def __sub__(self, other):
        return FormalSum(self._terms).iadd(other, -1)

    def __mul__(self, c: int):
        return FormalSum({k: c * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        if isinstance(other, FormalSum):
            return self._terms == other._terms
        return NotImplemented

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(sorted(self._terms))

    def items(self):
        return sorted(self._terms.items())

    def coefficient(self, key) -> int:
        return self._terms.get(key, 0)

    def map_keys(self, f) -> "FormalSum":
        out = FormalSum()
        for k, v in self._terms.items():
            out.add(f(k), v)
        return out

    def to_labels(self) -> dict[str, int]:
        return {str(k): v for k, v in self.items()}

    def __repr__(self):
        if not self._terms:
            return "0"
        chunks = []
        for k, v in self.items():
            sign = "-" if v < 0 else "+"
            mag = "" if abs(v) == 1 else f"{abs(v)}*"
            chunks.append(f"{sign} {mag}{k}")
        s = " ".join(chunks)
        return s[2:] if s.startswith("+ ") else s


# -- Rule 1 ------------------------------------------------------------------

def _parts_of(p: Partition):
    return [set(q) for q in p.parts]


def _make(parts, n) -> Partition:
    return Partition([sorted(q) for q in parts if q], n)


def _remove_last(p: Partition) -> Partition:
    n = p.n
    return _make([set(q) - {n} for q in p.parts], n - 1)


def _append_singleton(p: Partition) -> Partition:
    return Partition(list(p.parts) + [(p.n + 1,)], p.n + 1)


def _insert_into(p: Partition, item: int, j: int) -> Partition:
    parts = [set(q) | {item} if j in q else set(q) for q in p.parts]
    return _make(parts, p.n + 1)


def _crossing_parts(mu: Partition):
    """Parts crossing the part of the largest item, given mu minus that item is planar."""
    n = mu.n
    parts = _parts_of(mu)
    big = next(q for q in parts if n in q)
    b = big - {n}
    lo, hi = min(b), max(b)
    out = []
    for q in parts:
        if q is big:
            continue
        left = {x for x in q if x < lo}
        right = {x for x in q if hi < x < n}
        if left and right:
            out.append((q, left, right))
    return big, b, out


_RULE1_TERMS = (
    # (coefficient, parts as combinations of a, b, c, d)
    (1, ("a", "bcd")),
    (1, ("b", "acd")),
    (1, ("c", "abd")),
    (1, ("d", "abc")),
    (-1, ("ab", "cd")),
    (-1, ("ad", "bc")),
)


def _apply_rule1(rest, a, b, c, d, n):
    blocks = {"a": a, "b": b, "c": c, "d": d}
    for coeff, pattern in _RULE1_TERMS:
        new = [set().union(*(blocks[ch] for ch in piece)) for piece in pattern]
        yield coeff, _make(list(rest) + new, n)


@lru_cache(maxsize=None)
def _reduce_almost_planar(mu: Partition) -> FormalSum:
    if is_planar(mu):
        return FormalSum.single(mu)
    n = mu.n
    big, b, crossing = _crossing_parts(mu)
    if not crossing:
        raise GroveDimerError(f"{mu.label} is not almost planar")
    # the crossing part nested closest to the rest of n's part
    s, a, c = min(crossing, key=lambda t: min(t[2]))
    rest = [q for q in _parts_of(mu) if q != big and q != s]
    out = FormalSum()
    for coeff, term in _apply_rule1(rest, a, b, c, {n}, n):
        out.iadd(_reduce_almost_planar(term), coeff)
    return out


@lru_cache(maxsize=None)
def _rule1(tau: Partition) -> FormalSum:
    if is_planar(tau):
        return FormalSum.single(tau)
    n = tau.n
    part = next(q for q in tau.parts if n in q)
    smaller = _remove_last(tau)
    if len(part) == 1:
        return _rule1(smaller).map_keys(_append_singleton)
    j = min(x for x in part if x != n)
    out = FormalSum()
    for sigma, coeff in _rule1(smaller).items():
        out.iadd(_reduce_almost_planar(_insert_into(sigma, n, j)), coeff)
    return out


def rule1_rewrite(tau: Partition | str) -> FormalSum:
    if isinstance(tau, str):
        tau = Partition.parse(tau)
    result = _rule1(tau)
    return FormalSum(result.items())


def _crossing_quadruples(p: Partition):
    parts = [q for q in p.parts if len(q) > 1]
    for P, Q in itertools.permutations(parts, 2):
        for a, c in itertools.combinations(P, 2):
            for b in Q:
                if not a < b < c:
                    continue
                for d in Q:
                    if d > c:
                        yield P, Q, a, b, c, d


def rule1_rewrite_random(tau: Partition | str, rng: random.Random, *, max_steps: int = 100_000) -> FormalSum:
    """Apply Rule 1 with random crossings and random splits until planar.

    A free-form strategy used to check that the final answer does not
    depend on the choices; the step cap guards against wandering.
    """
    if isinstance(tau, str):
        tau = Partition.parse(tau)
    n = tau.n
    state = FormalSum.single(tau)
    steps = 0
    while True:
        bad = [k for k in state if not is_planar(k)]
        if not bad:
            return state
        steps += 1
        if steps > max_steps:
            raise GroveDimerError("random Rule 1 rewriting did not terminate")
        key = rng.choice(bad)
        coeff = state.coefficient(key)
        quads = list(_crossing_quadruples(key))
        P, Q, a, b, c, d = rng.choice(quads)
        A, C = _random_split(P, a, c, rng)
        B, D = _random_split(Q, b, d, rng)
        rest = [set(q) for q in key.parts if q != P and q != Q]
        state.add(key, -coeff)
        for k2, term in _apply_rule1(rest, A, B, C, D, n):
            state.add(term, coeff * k2)


def _random_split(part, x, y, rng):
    X, Y = {x}, {y}
    for z in part:
        if z in (x, y):
            continue
        (X if rng.random() < 0.5 else Y).add(z)
    return X, Y


# -- Rule 2 ------------------------------------------------------------------

def _pairing_from_perm(perm) -> OddEvenPairing:
    return OddEvenPairing(tuple(2 * v for v in perm))


def _swap_labels(perm: tuple[int, ...], i: int) -> tuple[int, ...]:
    """Exchange the values i and i+1 (even labels 2i and 2i+2)."""
    return tuple(i + 1 if v == i else i if v == i + 1 else v for v in perm)


def _untangle_asterisk(perm: tuple[int, ...], i: int) -> list[tuple[int, tuple[int, ...]]]:
    # the three chords at even 2i, odd 2i+1 and even 2i+2
    pos = {v: k for k, v in enumerate(perm)}
    odds = sorted({pos[i], i, pos[i + 1]})  # positions of the odd endpoints
    evens = [perm[k] for k in odds]
    out = []
    for arrangement in itertools.permutations(range(3)):
        if arrangement == (0, 1, 2):
            continue
        sign = permutation_sign(arrangement)
        new = list(perm)
        for slot, src in zip(odds, arrangement):
            new[slot] = evens[src]
        out.append((-sign, tuple(new)))
    return out


def _perm_planar(perm) -> bool:
    return _pairing_from_perm(perm).is_planar()


def _rule2_walk(target: tuple[int, ...], choose) -> FormalSum:
    n = len(target)
    current = tuple(range(1, n + 1))
    state: dict[tuple[int, ...], int] = {current: 1}
    while current != target:
        # g = target o current^{-1}; swap at a right descent of g
        cinv = [0] * n
        for k, v in enumerate(current):
            cinv[v - 1] = k
        g = [target[cinv[v]] for v in range(n)]
        descents = [i for i in range(1, n) if g[i - 1] > g[i]]
        i = choose(descents)
        current = _swap_labels(current, i)
        new_state: dict[tuple[int, ...], int] = {}
        for perm, coeff in state.items():
            swapped = _swap_labels(perm, i)
            if _perm_planar(swapped):
                terms = [(1, swapped)]
            else:
                terms = _untangle_asterisk(swapped, i)
            for c2, t in terms:
                if not _perm_planar(t):
                    raise GroveDimerError("Rule 2 produced a nonplanar pairing")
                v = new_state.get(t, 0) + coeff * c2
                if v:
                    new_state[t] = v
                else:
                    new_state.pop(t, None)
        state = new_state
    return FormalSum({_pairing_from_perm(p): c for p, c in state.items()})


@lru_cache(maxsize=None)
def _rule2(tau: OddEvenPairing) -> FormalSum:
    if tau.is_planar():
        return FormalSum.single(tau)
    return _rule2_walk(tau.permutation(), lambda ds: ds[0])


def rule2_rewrite(tau: OddEvenPairing | str) -> FormalSum:
    if isinstance(tau, str):
        tau = OddEvenPairing.parse(tau)
    return FormalSum(_rule2(tau).items())


def rule2_rewrite_random(tau: OddEvenPairing | str, rng: random.Random) -> FormalSum:
    if isinstance(tau, str):
        tau = OddEvenPairing.parse(tau)
    return _rule2_walk(tau.permutation(), rng.choice)


# -- matrices ----------------------------------------------------------------

@dataclass(frozen=True)
class ProjectionMatrix:
    rows: tuple
    cols: tuple
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "_ri", {r: k for k, r in enumerate(self.rows)})
        object.__setattr__(self, "_ci", {c: k for k, c in enumerate(self.cols)})

    def _key(self, label, index):
        if isinstance(label, str):
            for k in index:
                if str(k) == label:
                    return index[k]
            parsed = (Partition.parse(label) if isinstance(next(iter(index)), Partition)
                      else OddEvenPairing.parse(label))
            return index[parsed]
        return index[label]

    def entry(self, row, col) -> int:
        return self.entries[self._key(row, self._ri)][self._key(col, self._ci)]

    def row(self, row) -> dict:
        r = self.entries[self._key(row, self._ri)]
        return {c: v for c, v in zip(self.cols, r) if v}

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def to_json(self) -> dict:
        return {
            "rows": [str(r) for r in self.rows],
            "cols": [str(c) for c in self.cols],
            "entries": [list(r) for r in self.entries],
        }


def _assemble(rows, cols, column_sums) -> ProjectionMatrix:
    ri = {r: k for k, r in enumerate(rows)}
    table = [[0] * len(cols) for _ in rows]
    for j, fs in enumerate(column_sums):
        for key, v in fs.items():
            table[ri[key]][j] = v
    return ProjectionMatrix(tuple(rows), tuple(cols), tuple(tuple(r) for r in table))


def projection_groves(n: int) -> ProjectionMatrix:
    rows = enumerate_planar_partitions(n)
    cols = enumerate_partitions(n)
    return _assemble(rows, cols, [_rule1(c) for c in cols])


def projection_dd(n: int) -> ProjectionMatrix:
    rows = enumerate_planar_pairings(n)
    cols = enumerate_odd_even_pairings(n)
    return _assemble(rows, cols, [_rule2(c) for c in cols])


def sign_specialization_check(n: int) -> bool:
    """Compare every double-dimer entry with the signed grove entry on 2n items."""
    pdd = projection_dd(n)
    for j, tau in enumerate(pdd.cols):
        col = _rule1(tau.as_partition())
        for i, sigma in enumerate(pdd.rows):
            expected = relative_sign(sigma, tau) * col.coefficient(sigma.as_partition())
            if pdd.entries[i][j] != expected:
                return False
    return True


def clear_caches() -> None:
    _rule1.cache_clear()
    _reduce_almost_planar.cache_clear()
    _rule2.cache_clear()

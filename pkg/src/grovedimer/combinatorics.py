"""Set partitions, odd-even pairings and chord diagrams.

Items are 1-based.  A partition is stored canonically: items ascending
inside each part, parts ordered by their smallest item.  Ordering of
partitions is by the tuple of parts, which puts ``1|2`` before ``12``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Sequence

from .errors import PlanarityError, SizeLimitError

PARTITION_LIMIT = 9
PAIRING_LIMIT = 7


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


def bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def _item_str(parts: Sequence[Sequence[int]], n: int) -> str:
    if n < 10:
        return "|".join("".join(str(x) for x in p) for p in parts)
    return "|".join(",".join(str(x) for x in p) for p in parts)


@dataclass(frozen=True, order=True, init=False)
class Partition:
    parts: tuple[tuple[int, ...], ...]
    n: int

    def __init__(self, parts: Iterable[Iterable[int]], n: int | None = None):
        cleaned = tuple(sorted(t for t in (tuple(sorted(p)) for p in parts) if t))
        flat = sorted(x for p in cleaned for x in p)
        if n is None:
            n = len(flat)
        if flat != list(range(1, n + 1)):
            raise ValueError(f"parts {cleaned} do not partition 1..{n}")
        object.__setattr__(self, "parts", cleaned)
        object.__setattr__(self, "n", n)

    @classmethod
    def parse(cls, label: str) -> "Partition":
        label = label.strip()
        chunks = label.split("|")
        parts = []
        for chunk in chunks:
            chunk = chunk.strip()
            if not chunk:
                raise ValueError(f"empty part in {label!r}")
            if "," in chunk:
                parts.append([int(x) for x in chunk.split(",")])
            else:
                parts.append([int(c) for c in chunk])
        return cls(parts)

    @property
    def label(self) -> str:
        return _item_str(self.parts, self.n)

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"Partition({self.label!r})"

    @property
    def num_parts(self) -> int:
        return len(self.parts)

    def block_of(self) -> dict[int, int]:
        return {x: k for k, p in enumerate(self.parts) for x in p}

    def is_planar(self) -> bool:
        return is_planar(self)

    def relabel(self, mapping) -> "Partition":
        """Apply an item map (dict or callable) and re-canonicalize."""
        f = mapping.__getitem__ if isinstance(mapping, dict) else mapping
        return Partition([[f(x) for x in p] for p in self.parts])


def _rgs_partitions(n: int):
    # restricted growth strings, one per set partition
    a = [0] * n
    def rec(i, m):
        if i == n:
            yield tuple(a)
            return
        for v in range(m + 2):
            a[i] = v
            yield from rec(i + 1, max(m, v))
    if n == 0:
        yield ()
        return
    a[0] = 0
    yield from rec(1, 0)


def _check_limit(n: int, limit: int, what: str):
    if n < 1:
        raise ValueError(f"{what} need n >= 1, got {n}")
    if n > limit:
        raise SizeLimitError(f"{what} with n={n} exceed the limit {limit}")


@lru_cache(maxsize=None)
def _partitions_cached(n: int) -> tuple[Partition, ...]:
    out = []
    for rgs in _rgs_partitions(n):
        blocks: dict[int, list[int]] = {}
        for item, b in enumerate(rgs, start=1):
            blocks.setdefault(b, []).append(item)
        out.append(Partition(blocks.values(), n))
    out.sort()
    return tuple(out)


def enumerate_partitions(n: int, *, limit: int = PARTITION_LIMIT) -> list[Partition]:
    _check_limit(n, limit, "partitions")
    return list(_partitions_cached(n))


def enumerate_planar_partitions(n: int, *, limit: int = PARTITION_LIMIT) -> list[Partition]:
    _check_limit(n, limit, "partitions")
    return [p for p in _partitions_cached(n) if is_planar(p)]


def _parts_cross(a: Sequence[int], b: Sequence[int]) -> bool:
    merged = sorted([(x, 0) for x in a] + [(x, 1) for x in b])
    runs = 1
    for (_, s), (_, t) in zip(merged, merged[1:]):
        if s != t:
            runs += 1
            if runs >= 4:
                return True
    return False


def is_planar(p: Partition) -> bool:
    parts = [q for q in p.parts if len(q) > 1]
    for a, b in itertools.combinations(parts, 2):
        if _parts_cross(a, b):
            return False
    return True


# -- odd-even pairings -------------------------------------------------------

@dataclass(frozen=True, order=True)
class OddEvenPairing:
    """Perfect matching of 1..2n sending odd items to even items.

    ``evens[k]`` is the even partner of the odd item ``2k+1``.
    """
    evens: tuple[int, ...]

    def __post_init__(self):
        ev = tuple(self.evens)
        object.__setattr__(self, "evens", ev)
        n = len(ev)
        if sorted(ev) != list(range(2, 2 * n + 1, 2)):
            raise ValueError(f"{ev} is not a bijection onto the even items 2..{2 * n}")

    @property
    def n(self) -> int:
        return len(self.evens)

    @classmethod
    def parse(cls, label: str) -> "OddEvenPairing":
        pairs = {}
        for chunk in label.strip().split("|"):
            a, b = (int(x) for x in chunk.split("-"))
            if a % 2 == 0:
                a, b = b, a
            if a % 2 == 0 or b % 2 == 1:
                raise ValueError(f"pair {chunk!r} does not join an odd and an even item")
            if a in pairs:
                raise ValueError(f"odd item {a} paired twice in {label!r}")
            pairs[a] = b
        n = len(pairs)
        if sorted(pairs) != list(range(1, 2 * n, 2)):
            raise ValueError(f"{label!r} does not cover the odd items")
        return cls(tuple(pairs[2 * k + 1] for k in range(n)))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]]) -> "OddEvenPairing":
        return cls.parse("|".join(f"{a}-{b}" for a, b in pairs))

    @property
    def label(self) -> str:
        return "|".join(f"{2 * k + 1}-{b}" for k, b in enumerate(self.evens))

    def __str__(self):
        return self.label

    def __repr__(self):
        return f"OddEvenPairing({self.label!r})"

    def pairs(self) -> list[tuple[int, int]]:
        return [(2 * k + 1, b) for k, b in enumerate(self.evens)]

    def mate(self) -> dict[int, int]:
        m = {}
        for a, b in self.pairs():
            m[a] = b
            m[b] = a
        return m

    def as_partition(self) -> Partition:
        return Partition(self.pairs(), 2 * self.n)

    def permutation(self) -> tuple[int, ...]:
        """The induced permutation k -> evens[k]/2 on 1..n (returned 1-based)."""
        return tuple(b // 2 for b in self.evens)

    def is_planar(self) -> bool:
        return crossing_count(self) == 0


def pairing_from_partition(p: Partition) -> OddEvenPairing:
    if p.n % 2 or any(len(q) != 2 for q in p.parts):
        raise ValueError(f"{p.label} is not a perfect matching")
    return OddEvenPairing.from_pairs(p.parts)


@lru_cache(maxsize=None)
def _pairings_cached(n: int) -> tuple[OddEvenPairing, ...]:
    evens = list(range(2, 2 * n + 1, 2))
    return tuple(OddEvenPairing(t) for t in itertools.permutations(evens))


def enumerate_odd_even_pairings(n: int, *, limit: int = PAIRING_LIMIT) -> list[OddEvenPairing]:
    _check_limit(n, limit, "pairings")
    return list(_pairings_cached(n))


def enumerate_planar_pairings(n: int, *, limit: int = PAIRING_LIMIT) -> list[OddEvenPairing]:
    _check_limit(n, limit, "pairings")
    return [p for p in _pairings_cached(n) if crossing_count(p) == 0]


def _chords_cross(c1, c2) -> bool:
    a, b = sorted(c1)
    c, d = sorted(c2)
    return (a < c < b < d) or (c < a < d < b)


def crossing_count(p: OddEvenPairing | Sequence[Sequence[int]]) -> int:
    pairs = p.pairs() if isinstance(p, OddEvenPairing) else list(p)
    return sum(_chords_cross(x, y) for x, y in itertools.combinations(pairs, 2))


def permutation_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation given as a sequence of distinct comparable values."""
    order = sorted(range(len(perm)), key=lambda i: perm[i])
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def pairing_parity(p: OddEvenPairing) -> int:
    return permutation_sign(p.evens)


def relative_sign(sigma: OddEvenPairing, tau: OddEvenPairing) -> int:
    """Signature of sigma^{-1} tau as permutations of 1..n."""
    return pairing_parity(sigma) * pairing_parity(tau)


# -- chord diagrams ----------------------------------------------------------

@dataclass(frozen=True)
class ChordDiagram:
    chords: tuple[tuple[int, int], ...]

    def __post_init__(self):
        ch = tuple(sorted(tuple(sorted(c)) for c in self.chords))
        ends = sorted(x for c in ch for x in c)
        if ends != list(range(1, 2 * len(ch) + 1)):
            raise ValueError("chords must perfectly match the endpoints 1..2m")
        object.__setattr__(self, "chords", ch)

    @property
    def m(self) -> int:
        return len(self.chords)

    def mate(self) -> dict[int, int]:
        out = {}
        for a, b in self.chords:
            out[a] = b
            out[b] = a
        return out

    def crossings(self) -> int:
        return crossing_count(self.chords)


def chord_diagram(p: Partition) -> ChordDiagram:
    """Planar chord diagram separating the parts of ``p`` from its dual parts.

    Endpoint ``2i-1`` sits just before node ``i`` and ``2i`` just after it.
    """
    if not is_planar(p):
        raise PlanarityError(f"{p.label} is not planar")
    chords = []
    for part in p.parts:
        k = len(part)
        for j in range(k):
            chords.append((2 * part[j], 2 * part[(j + 1) % k] - 1))
    return ChordDiagram(tuple(chords))


def partition_from_chord_diagram(c: ChordDiagram) -> Partition:
    mate = c.mate()
    n = c.m
    nxt = {i: (mate[2 * i] + 1) // 2 for i in range(1, n + 1)}
    return _cycles(nxt, n)


def _cycles(nxt: dict[int, int], n: int) -> Partition:
    seen = set()
    parts = []
    for i in range(1, n + 1):
        if i in seen:
            continue
        cyc = []
        j = i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = nxt[j]
        parts.append(cyc)
    return Partition(parts, n)


def dual_partition(p: Partition) -> Partition:
    """Kreweras-style dual; dual node ``i`` sits between primal nodes ``i`` and ``i+1``."""
    c = chord_diagram(p)
    mate = c.mate()
    n = p.n
    nxt = {}
    for i in range(1, n + 1):
        e = 2 * i + 1 if i < n else 1
        nxt[i] = mate[e] // 2
    return _cycles(nxt, n)


def meander_loop_count(c1: ChordDiagram, c2: ChordDiagram) -> int:
    if c1.m != c2.m:
        raise ValueError("chord diagrams have different sizes")
    m1, m2 = c1.mate(), c2.mate()
    seen = set()
    loops = 0
    for start in range(1, 2 * c1.m + 1):
        if start in seen:
            continue
        loops += 1
        x = start
        while True:
            seen.add(x)
            y = m1[x]
            seen.add(y)
            x = m2[y]
            if x == start:
                break
    return loops


def pairing_chord_diagram(p: OddEvenPairing) -> ChordDiagram:
    return ChordDiagram(tuple(p.pairs()))


def rotate_partition(p: Partition, shift: int = 1) -> Partition:
    n = p.n
    return p.relabel(lambda x: (x - 1 + shift) % n + 1)


def perfect_matchings(items: Sequence[int]):
    """All perfect matchings of ``items`` as lists of pairs."""
    items = list(items)
    if not items:
        yield []
        return
    a = items[0]
    for k in range(1, len(items)):
        b = items[k]
        rest = items[1:k] + items[k + 1:]
        for m in perfect_matchings(rest):
            yield [(a, b)] + m


def stirling_first_unsigned(n: int, k: int) -> int:
    table = [[0] * (n + 1) for _ in range(n + 1)]
    table[0][0] = 1
    for i in range(1, n + 1):
        for j in range(1, i + 1):
            table[i][j] = table[i - 1][j - 1] + (i - 1) * table[i - 1][j]
    return table[n][k]


__all__ = [
    "Partition", "OddEvenPairing", "ChordDiagram",
    "enumerate_partitions", "enumerate_planar_partitions",
    "enumerate_odd_even_pairings", "enumerate_planar_pairings",
    "is_planar", "crossing_count", "pairing_parity", "relative_sign",
    "chord_diagram", "partition_from_chord_diagram", "dual_partition",
    "meander_loop_count", "pairing_chord_diagram", "pairing_from_partition",
    "rotate_partition", "perfect_matchings", "permutation_sign",
    "catalan", "bell", "stirling_first_unsigned", "factorial",
]

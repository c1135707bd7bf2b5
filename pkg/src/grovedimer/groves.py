"""Groves: brute-force enumeration and the polynomial evaluators."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np

from . import _accel
from .circuit import (
    CircularPlanarGraph,
    ResistanceMatrix,
    ResponseMatrix,
    l_tau,
    quotient_graph,
    response_matrix,
    spanning_tree_weight,
)
from .combinatorics import (
    Partition,
    dual_partition,
    enumerate_partitions,
    enumerate_planar_partitions,
)
from .errors import OracleSizeError
from .meander import form_t
from .polynomial import Poly, pair_var
from .projection import _rule1, projection_groves

ORACLE_EDGE_LIMIT = 16


@dataclass(frozen=True)
class GroveDistribution:
    n: int
    weights: Mapping[Partition, Fraction]

    def Z(self, sigma: Partition | str) -> Fraction:
        if isinstance(sigma, str):
            sigma = Partition.parse(sigma)
        return self.weights.get(sigma, Fraction(0))

    @property
    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def probability(self, sigma) -> Fraction:
        return self.Z(sigma) / self.total

    def probabilities(self) -> dict[Partition, Fraction]:
        t = self.total
        return {s: w / t for s, w in sorted(self.weights.items())}

    def tree(self) -> Fraction:
        return self.Z(Partition([range(1, self.n + 1)]))

    def uncrossing(self) -> Fraction:
        return self.Z(Partition([[i] for i in range(1, self.n + 1)]))


def tree_partition(n: int) -> Partition:
    return Partition([range(1, n + 1)], n)


def uncrossing_partition(n: int) -> Partition:
    return Partition([[i] for i in range(1, n + 1)], n)


def enumerate_groves(g: CircularPlanarGraph, *, limit: int = ORACLE_EDGE_LIMIT,
                     use_numba: bool | None = None) -> GroveDistribution:
    E = len(g.edges)
    if E > limit:
        raise OracleSizeError(f"{E} edges exceed the grove oracle limit {limit}")
    n = g.n
    node_of = np.full(g.num_vertices, -1, dtype=np.int64)
    for k, v in enumerate(g.nodes):
        node_of[v] = k
    us = [u for u, _, _ in g.edges]
    vs = [v for _, v, _ in g.edges]
    masks, codes = _accel.classify_groves(us, vs, g.num_vertices, node_of, n, use_numba=use_numba)
    weights = [w for _, _, w in g.edges]
    by_code: dict[int, Fraction] = {}
    for mask, code in zip(masks.tolist(), codes.tolist()):
        w = Fraction(1)
        e = 0
        while mask:
            if mask & 1:
                w *= weights[e]
            mask >>= 1
            e += 1
        by_code[code] = by_code.get(code, Fraction(0)) + w
    out = {}
    for code, w in by_code.items():
        rgs = _accel.decode_rgs(code, n)
        blocks: dict[int, list[int]] = {}
        for item, b in enumerate(rgs, start=1):
            blocks.setdefault(b, []).append(item)
        out[Partition(blocks.values(), n)] = w
    return GroveDistribution(n, out)


# -- L polynomials -----------------------------------------------------------

def _lambda_of(lam, n):
    if isinstance(lam, CircularPlanarGraph):
        lam = response_matrix(lam)
    return lam


def grove_probabilities(lam, n: int | None = None) -> dict[Partition, object]:
    """Pr(sigma)/Pr(uncrossing) for every planar sigma.

    ``lam`` is a ResponseMatrix, a matrix of response entries, or a callable
    ``L(i, j)``; arithmetic follows the entries (exact or float).
    """
    lam = _lambda_of(lam, n)
    if n is None:
        n = lam.n if isinstance(lam, ResponseMatrix) else len(lam)
    P = projection_groves(n)
    cache = {tau: l_tau(tau, lam) for tau in P.cols}
    out = {}
    for i, sigma in enumerate(P.rows):
        total = 0
        for j, tau in enumerate(P.cols):
            c = P.entries[i][j]
            if c:
                total = total + c * cache[tau]
        out[sigma] = total
    return out


def normalize(values: Mapping, how: str = "total", n: int | None = None) -> dict:
    values = dict(values)
    if n is None:
        n = next(iter(values)).n
    if how == "uncrossing":
        d = values[uncrossing_partition(n)]
    elif how == "tree":
        d = values[tree_partition(n)]
    elif how == "total":
        d = sum(values.values())
    else:
        raise ValueError(f"unknown normalization {how!r}")
    return {k: v / d for k, v in values.items()}


def _tree_poly(part) -> Poly:
    k = len(part)
    if k == 1:
        return Poly.const(1)
    out = Poly()
    # Pruefer sequences enumerate the labeled trees on the part
    for seq in itertools.product(range(k), repeat=k - 2):
        degree = [1] * k
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = min(i for i in range(k) if degree[i] == 1)
            edges.append((leaf, x))
            degree[leaf] -= 1
            degree[x] -= 1
        u, v = [i for i in range(k) if degree[i] == 1]
        edges.append((u, v))
        out = out + Poly.monomial(pair_var("L", part[a], part[b]) for a, b in edges)
    return out


@lru_cache(maxsize=None)
def l_tau_poly(tau: Partition) -> Poly:
    out = Poly.const(1)
    for part in tau.parts:
        out = out * _tree_poly(part)
    return out


@lru_cache(maxsize=None)
def l_polynomials(n: int) -> dict[Partition, Poly]:
    """Pr(sigma)/Pr(uncrossing) as a polynomial in the L variables."""
    out = {}
    for sigma in enumerate_planar_partitions(n):
        out[sigma] = Poly()
    for tau in enumerate_partitions(n):
        col = _rule1(tau)
        if not len(col):
            continue
        lp = l_tau_poly(tau)
        for sigma, c in col.items():
            out[sigma] = out[sigma] + lp * c
    return out


def l_polynomial(sigma: Partition | str) -> Poly:
    if isinstance(sigma, str):
        sigma = Partition.parse(sigma)
    return l_polynomials(sigma.n)[sigma]


def _dual_substitution(n: int) -> dict:
    def R(i, j):
        i = (i - 1) % n + 1
        j = (j - 1) % n + 1
        if i == j:
            return Poly()
        return Poly.var(pair_var("R", i, j))
    half = Fraction(1, 2)
    sub = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            sub[pair_var("L", i, j)] = (R(i, j) + R(i + 1, j + 1) - R(i, j + 1) - R(i + 1, j)) * half
    return sub


@lru_cache(maxsize=None)
def r_polynomials(n: int) -> dict[Partition, Poly]:
    """Pr(sigma)/Pr(tree) as a polynomial in the pairwise resistances."""
    lp = l_polynomials(n)
    sub = _dual_substitution(n)
    return {sigma: lp[dual_partition(sigma)].substitute(sub) for sigma in lp}


def r_polynomial(sigma: Partition | str) -> Poly:
    if isinstance(sigma, str):
        sigma = Partition.parse(sigma)
    return r_polynomials(sigma.n)[sigma]


def grove_probabilities_r(resist, n: int | None = None) -> dict[Partition, object]:
    """Pr(sigma)/Pr(tree) for every planar sigma from the resistance matrix."""
    if isinstance(resist, ResistanceMatrix):
        get = resist.R
        n = resist.n if n is None else n
    elif callable(resist):
        get = resist
    else:
        n = len(resist) if n is None else n
        get = lambda i, j: resist[i - 1][j - 1]
    polys = r_polynomials(n)
    sample = get(1, 2) if n > 1 else 0
    zero = 0.0 if isinstance(sample, float) else Fraction(0)
    values = lambda v: get(v[1], v[2])
    return {s: p.evaluate(values, zero=zero) for s, p in polys.items()}


# -- identities checked against the oracle ----------------------------------

def verify_general_graph_identity(g: CircularPlanarGraph, *, limit: int = ORACLE_EDGE_LIMIT) -> bool:
    dist = enumerate_groves(g, limit=limit)
    lam = response_matrix(g)
    n = g.n
    unc = dist.uncrossing()
    P = projection_groves(n)
    for i, sigma in enumerate(P.rows):
        lhs = Fraction(0)
        rhs = Fraction(0)
        for j, tau in enumerate(P.cols):
            c = P.entries[i][j]
            if c:
                lhs += c * dist.Z(tau) / unc
                rhs += c * l_tau(tau, lam)
        if lhs != rhs:
            return False
    return True


def verify_gluing(g: CircularPlanarGraph, *, limit: int = ORACLE_EDGE_LIMIT) -> bool:
    dist = enumerate_groves(g, limit=limit)
    n = g.n
    for sigma in enumerate_planar_partitions(n):
        lhs = spanning_tree_weight(quotient_graph(g, sigma))
        rhs = sum((form_t(sigma, tau) * w for tau, w in dist.weights.items()), Fraction(0))
        if lhs != rhs:
            return False
    return True

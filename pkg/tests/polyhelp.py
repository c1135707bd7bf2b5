"""Parse compact polynomial strings used as expected values in tests.

Syntax: terms joined by ``+``/``-``; a term is an optional rational
coefficient followed by ``*``-separated factors.  Factors are ``R12``,
``L34``, ``X36`` (two one-digit indices, order irrelevant) with optional
``^e``, or ``L[13|24]`` which expands to the forest polynomial of that
partition.  A trailing ``/d`` on the whole string divides everything.
"""
import itertools
import re
from fractions import Fraction

from grovedimer.combinatorics import Partition
from grovedimer.groves import l_tau_poly
from grovedimer.polynomial import Poly, pair_var

_TERM = re.compile(r"\s*([+-]?)\s*([^+-]+)")


def _factor(tok: str) -> Poly:
    tok = tok.strip()
    m = re.fullmatch(r"L\[([0-9|]+)\]", tok)
    if m:
        return l_tau_poly(Partition.parse(m.group(1)))
    m = re.fullmatch(r"([A-Z])(\d)(\d)(?:\^(\d+))?", tok)
    if m:
        name, i, j, e = m.group(1), int(m.group(2)), int(m.group(3)), m.group(4)
        return Poly.var(pair_var(name, i, j)) ** int(e or 1)
    return Poly.const(Fraction(tok))


def parse(text: str) -> Poly:
    text = text.strip()
    div = 1
    m = re.fullmatch(r"\((.*)\)\s*/\s*(\d+)", text, re.S)
    if m:
        text, div = m.group(1), int(m.group(2))
    out = Poly()
    for sign, body in _TERM.findall(text):
        term = Poly.const(1)
        for tok in body.split("*"):
            if tok.strip():
                term = term * _factor(tok)
        out = out - term if sign == "-" else out + term
    return out * Fraction(1, div)


def det_poly(rows) -> Poly:
    """Leibniz expansion of a square matrix of Poly entries."""
    n = len(rows)
    out = Poly()
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = Poly.const(-1 if inv % 2 else 1)
        for i, j in enumerate(perm):
            term = term * rows[i][j]
        out = out + term
    return out


def xmat(rows):
    """Rows like "X12 X14 0 0" to a matrix of Poly entries."""
    return [[parse(tok) if tok != "0" else Poly() for tok in row.split()] for row in rows]

"""Sparse multivariate polynomials with rational coefficients.

Variables are arbitrary hashable, orderable keys; the package uses
``("L", i, j)``, ``("R", i, j)`` and ``("X", i, j)`` with ``i < j``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping

Monomial = tuple  # sorted tuple of (var, exponent)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self.terms: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[m] = Fraction(c)

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c)})

    @classmethod
    def var(cls, v) -> "Poly":
        return cls({((v, 1),): Fraction(1)})

    @classmethod
    def monomial(cls, variables: Iterable, coeff=1) -> "Poly":
        d: dict = {}
        for v in variables:
            d[v] = d.get(v, 0) + 1
        return cls({tuple(sorted(d.items())): Fraction(coeff)})

    def copy(self) -> "Poly":
        p = Poly()
        p.terms = dict(self.terms)
        return p

    def _coerce(self, other) -> "Poly":
        return other if isinstance(other, Poly) else Poly.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = self.copy()
        for m, c in other.terms.items():
            v = out.terms.get(m, 0) + c
            if v:
                out.terms[m] = v
            else:
                out.terms.pop(m, None)
        return out

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        p = Poly()
        p.terms = out
        return p

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e for _, e in m) for m in self.terms}) <= 1

    def evaluate(self, values: Mapping | Callable, zero=0):
        get = values if callable(values) else values.__getitem__
        total = zero
        for m, c in self.terms.items():
            t = c if not isinstance(zero, float) else float(c)
            for v, e in m:
                t = t * get(v) ** e
            total = total + t
        return total

    def substitute(self, mapping: Mapping) -> "Poly":
        """Replace variables by polynomials (variables not in ``mapping`` stay)."""
        out = Poly()
        cache: dict = {}
        for m, c in self.terms.items():
            term = Poly.const(c)
            for v, e in m:
                if v in mapping:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = mapping[v] ** e
                    term = term * cache[key]
                else:
                    term = term * Poly({((v, e),): 1})
            out = out + term
        return out

    def rename(self, f: Callable) -> "Poly":
        out: dict = {}
        for m, c in self.terms.items():
            d: dict = {}
            for v, e in m:
                w = f(v)
                d[w] = d.get(w, 0) + e
            key = tuple(sorted(d.items()))
            out[key] = out.get(key, 0) + c
        return Poly(out)

    def coefficient_multiset(self) -> dict:
        return dict(self.terms)

    def __repr__(self):
        return self.format()

    def format(self, var_fmt: Callable | None = None) -> str:
        if not self.terms:
            return "0"
        var_fmt = var_fmt or _default_var
        pieces = []
        for m in sorted(self.terms):
            c = self.terms[m]
            body = "*".join(var_fmt(v) + (f"^{e}" if e > 1 else "") for v, e in m)
            mag = abs(c)
            if body:
                coeff = "" if mag == 1 else f"{mag}*"
                s = coeff + body
            else:
                s = str(mag)
            pieces.append(("-" if c < 0 else "+", s))
        text = " ".join(f"{sg} {s}" for sg, s in pieces)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def _default_var(v) -> str:
    if isinstance(v, tuple) and len(v) == 3:
        name, i, j = v
        return f"{name}{i},{j}" if max(i, j) >= 10 else f"{name}{i}{j}"
    return str(v)


def pair_var(name: str, i: int, j: int):
    return (name, min(i, j), max(i, j))

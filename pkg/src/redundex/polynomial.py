"""Exact-rational polynomials in the two error probabilities ``pq`` and ``pm``."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

Monomial = tuple[int, int]  # (degree in pq, degree in pm)

_TERM_RE = re.compile(
    r"^\s*(?P<coef>[+-]?\d+(?:/\d+)?)"
    r"(?:\s+(?P<pq>pq)(?:\^(?P<a>\d+))?)?"
    r"(?:\s+(?P<pm>pm)(?:\^(?P<b>\d+))?)?\s*$"
)


class BivariatePolynomial:
    """Sparse polynomial with :class:`~fractions.Fraction` coefficients.

    Zero coefficients are never stored. Instances are treated as immutable.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean: dict[Monomial, Fraction] = {}
        for (a, b), c in (terms or {}).items():
            if a < 0 or b < 0:
                raise ValueError(f"negative exponent in {(a, b)}")
            c = Fraction(c)
            if c:
                clean[(int(a), int(b))] = clean.get((a, b), 0) + c
        self._terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def constant(cls, c) -> BivariatePolynomial:
        return cls({(0, 0): c})

    @classmethod
    def pq(cls) -> BivariatePolynomial:
        return cls({(1, 0): 1})

    @classmethod
    def pm(cls) -> BivariatePolynomial:
        return cls({(0, 1): 1})

    @classmethod
    def zero(cls) -> BivariatePolynomial:
        return cls()

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def coefficient(self, a: int, b: int) -> Fraction:
        return self._terms.get((a, b), Fraction(0))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def degree(self) -> int:
        return max((a + b for a, b in self._terms), default=-1)

    @property
    def lowest_degree(self) -> int | None:
        return min((a + b for a, b in self._terms), default=None)

    # arithmetic

    @staticmethod
    def _coerce(other) -> BivariatePolynomial:
        if isinstance(other, BivariatePolynomial):
            return other
        if isinstance(other, (int, Rational)):
            return BivariatePolynomial.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return BivariatePolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return BivariatePolynomial({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other: BivariatePolynomial, max_degree: int | None = None) -> BivariatePolynomial:
        """Product, optionally dropping every term above ``max_degree``."""
        out: dict[Monomial, Fraction] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                if max_degree is not None and a1 + a2 + b1 + b2 > max_degree:
                    continue
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, 0) + c1 * c2
        return BivariatePolynomial(out)

    def __pow__(self, k: int) -> BivariatePolynomial:
        if k < 0:
            raise ValueError("negative power")
        result = BivariatePolynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # views

    def truncate(self, max_total_degree: int) -> BivariatePolynomial:
        return BivariatePolynomial({k: v for k, v in self._terms.items() if sum(k) <= max_total_degree})

    def homogeneous_part(self, degree: int) -> BivariatePolynomial:
        return BivariatePolynomial({k: v for k, v in self._terms.items() if sum(k) == degree})

    def substitute_pq_zero(self) -> BivariatePolynomial:
        return BivariatePolynomial({k: v for k, v in self._terms.items() if k[0] == 0})

    def substitute_pm_zero(self) -> BivariatePolynomial:
        return BivariatePolynomial({k: v for k, v in self._terms.items() if k[1] == 0})

    def evaluate(self, pq, pm):
        """Value at a point; exact when ``pq`` and ``pm`` are rationals."""
        if isinstance(pq, float) or isinstance(pm, float):
            pq, pm = Fraction(pq), Fraction(pm)
        amax = max((a for a, _ in self._terms), default=0)
        bmax = max((b for _, b in self._terms), default=0)
        pq_pows = [pq**i for i in range(amax + 1)]
        pm_pows = [pm**j for j in range(bmax + 1)]
        return sum((c * pq_pows[a] * pm_pows[b] for (a, b), c in self._terms.items()), Fraction(0))

    __call__ = evaluate

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms by ascending total degree, then descending power of ``pq``."""
        return sorted(self._terms.items(), key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][0]))

    # text forms

    def to_text(self) -> str:
        """One ``<coef> pq^a pm^b`` line per term; empty string for zero."""
        lines = []
        for (a, b), c in self.sorted_terms():
            parts = [str(c)]
            if a:
                parts.append(f"pq^{a}")
            if b:
                parts.append(f"pm^{b}")
            lines.append(" ".join(parts))
        return "".join(line + "\n" for line in lines)

    @classmethod
    def from_text(cls, text: str) -> BivariatePolynomial:
        terms: dict[Monomial, Fraction] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0]
            if not line.strip():
                continue
            m = _TERM_RE.match(line)
            if not m:
                raise ValueError(f"line {lineno}: cannot parse term {line!r}")
            a = int(m.group("a") or 1) if m.group("pq") else 0
            b = int(m.group("b") or 1) if m.group("pm") else 0
            k = (a, b)
            terms[k] = terms.get(k, 0) + Fraction(m.group("coef"))
        return cls(terms)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for i, ((a, b), c) in enumerate(self.sorted_terms()):
            mono = "*".join(
                v for v in (
                    ("pq" if a == 1 else f"pq^{a}") if a else "",
                    ("pm" if b == 1 else f"pm^{b}") if b else "",
                ) if v
            )
            mag = abs(c)
            body = mono if mono and mag == 1 else (f"{mag}*{mono}" if mono else str(mag))
            if i == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append(("- " if c < 0 else "+ ") + body)
        return " ".join(out)

    def __repr__(self) -> str:
        return f"BivariatePolynomial({self})"


def from_univariate_pq(coeffs: Iterable) -> BivariatePolynomial:
    return BivariatePolynomial({(i, 0): c for i, c in enumerate(coeffs)})


def from_univariate_pm(coeffs: Iterable) -> BivariatePolynomial:
    return BivariatePolynomial({(0, j): c for j, c in enumerate(coeffs)})


PQ = BivariatePolynomial.pq()
PM = BivariatePolynomial.pm()
ONE = BivariatePolynomial.constant(1)

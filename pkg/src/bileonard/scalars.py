"""Exact scalars: rationals and elements of Q(sqrt(s1), sqrt(s2)).

Rationals are ``gmpy2.mpq`` values.  :class:`ExtScalar` stores a sum
``sum_k c_k * sqrt(k)`` over square-free integers ``k`` (``k == 1`` is the
rational part), where ``sqrt`` is the principal complex square root.  That
convention fixes the product rule ``sqrt(a) * sqrt(b) = -sqrt(ab)`` when both
``a`` and ``b`` are negative, and ``+sqrt(ab)`` otherwise, so every element
has one canonical dictionary and equality is syntactic.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC
import re
from typing import Union

import gmpy2
from gmpy2 import mpq, mpz

Rational = type(mpq(0))


class DomainError(ArithmeticError):
    """Operand outside the domain of an exact operation (zero radicand, 1/0)."""


class UnsupportedExtension(ArithmeticError):
    """The result would need a third independent square root."""


def Q(value) -> Rational:
    """Coerce ``value`` (int, str ``"p/q"``, Fraction, mpq) to a rational."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, ExtScalar):
        if not value.is_rational:
            raise TypeError(f"{value} is not rational")
        return value.rational_part
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, (int, type(mpz(0)))):
        return mpq(value)
    if isinstance(value, (Fraction, _RationalABC)):
        return mpq(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        text = value.strip()
        try:
            return mpq(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def _trial_factor(n: int) -> dict[int, int]:
    factors: dict[int, int] = {}
    p = 2
    while p * p <= n:
        if p > 50 and gmpy2.is_prime(n):
            break
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def normalize_radicand(n: int) -> tuple[int, int]:
    """Split ``n`` as ``outer**2 * square_free``; returns ``(square_free, outer)``.

    ``square_free`` keeps the sign of ``n``; it is 1 for positive perfect squares.
    """
    n = int(n)
    if n == 0:
        raise DomainError("radicand must be nonzero")
    sign = -1 if n < 0 else 1
    square_free, outer = 1, 1
    for p, e in _trial_factor(abs(n)).items():
        outer *= p ** (e // 2)
        if e % 2:
            square_free *= p
    return sign * square_free, outer


def _mul_keys(a: int, b: int) -> tuple[int, int]:
    # sqrt(a) * sqrt(b) = factor * sqrt(key) under the principal-root convention
    if a == 1:
        return b, 1
    if b == 1:
        return a, 1
    key, outer = normalize_radicand(a * b)
    return key, (-outer if a < 0 and b < 0 else outer)


def _field_generators(keys) -> tuple[int, ...]:
    nontrivial = sorted(k for k in keys if k != 1)
    if len(nontrivial) <= 2:
        return tuple(nontrivial)
    s1, s2 = nontrivial[:2]
    third = _mul_keys(s1, s2)[0]
    for k in nontrivial[2:]:
        if k != third:
            raise UnsupportedExtension(
                f"radicands {nontrivial} need more than two square roots"
            )
    return (s1, s2)


class ExtScalar:
    """Element of Q(sqrt(s1), sqrt(s2)) with at most two adjoined radicands."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean: dict[int, Rational] = {}
        for key, coeff in (terms or {}).items():
            coeff = Q(coeff)
            if coeff:
                key = int(key)
                if key == 0:
                    raise DomainError("radicand must be nonzero")
                sf, outer = normalize_radicand(key)
                clean[sf] = clean.get(sf, mpq(0)) + coeff * outer
        self._terms = {k: v for k, v in clean.items() if v}
        _field_generators(self._terms)

    @classmethod
    def _raw(cls, terms: dict[int, Rational]) -> ExtScalar:
        obj = object.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def sqrt_of(cls, radicand: int) -> ExtScalar:
        return cls({radicand: 1})

    @property
    def terms(self) -> dict[int, Rational]:
        return dict(self._terms)

    @property
    def is_rational(self) -> bool:
        return all(k == 1 for k in self._terms)

    @property
    def rational_part(self) -> Rational:
        return self._terms.get(1, mpq(0))

    @property
    def radicands(self) -> tuple[int, ...]:
        """The generators ``(s1, s2)`` (ascending), or fewer."""
        return _field_generators(self._terms)

    def coefficients(self) -> tuple[tuple[Rational, ...], tuple[int, ...]]:
        """Coefficients ``(c0, c1, c2, c3)`` over ``1, sqrt(s1), sqrt(s2), sqrt(s1)sqrt(s2)``."""
        gens = self.radicands
        c = [self.rational_part, mpq(0), mpq(0), mpq(0)]
        if gens:
            c[1] = self._terms.get(gens[0], mpq(0))
        if len(gens) == 2:
            c[2] = self._terms.get(gens[1], mpq(0))
            key, factor = _mul_keys(*gens)
            c[3] = self._terms.get(key, mpq(0)) / factor
        return tuple(c), gens

    @classmethod
    def from_coefficients(cls, c, gens) -> ExtScalar:
        c = [Q(v) for v in c] + [mpq(0)] * (4 - len(c))
        gens = tuple(int(g) for g in gens)
        out = cls({1: c[0]})
        basis = [cls.sqrt_of(g) for g in gens]
        if len(basis) >= 1:
            out = out + c[1] * basis[0]
        if len(basis) == 2:
            out = out + c[2] * basis[1] + c[3] * (basis[0] * basis[1])
        elif c[2] or c[3]:
            raise ValueError("c2/c3 given without two radicands")
        return out

    # arithmetic -------------------------------------------------------

    @staticmethod
    def _lift(other) -> ExtScalar | None:
        if isinstance(other, ExtScalar):
            return other
        try:
            q = Q(other)
        except TypeError:
            return None
        return ExtScalar._raw({1: q} if q else {})

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms = dict(self._terms)
        for k, v in o._terms.items():
            s = terms.get(k, mpq(0)) + v
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        _field_generators(terms)
        return ExtScalar._raw(terms)

    __radd__ = __add__

    def __neg__(self):
        return ExtScalar._raw({k: -v for k, v in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        _field_generators(set(self._terms) | set(o._terms))
        terms: dict[int, Rational] = {}
        for a, ca in self._terms.items():
            for b, cb in o._terms.items():
                key, factor = _mul_keys(a, b)
                terms[key] = terms.get(key, mpq(0)) + ca * cb * factor
        terms = {k: v for k, v in terms.items() if v}
        _field_generators(terms)
        return ExtScalar._raw(terms)

    __rmul__ = __mul__

    def conjugates(self) -> list[ExtScalar]:
        """All Galois conjugates over Q, the identity first."""
        gens = self.radicands
        if not gens:
            return [self]
        images = []
        for signs in ((1, 1), (-1, 1), (1, -1), (-1, -1))[: 2 ** len(gens)]:
            sign_of = {1: 1, gens[0]: signs[0]}
            if len(gens) == 2:
                sign_of[gens[1]] = signs[1]
                sign_of[_mul_keys(*gens)[0]] = signs[0] * signs[1]
            images.append(
                ExtScalar._raw({k: v * sign_of[k] for k, v in self._terms.items()})
            )
        return images

    def inverse(self) -> ExtScalar:
        if not self._terms:
            raise DomainError("division by zero")
        conj = self.conjugates()
        num = ExtScalar._raw({1: mpq(1)})
        for c in conj[1:]:
            num = num * c
        norm = self * num
        if not norm.is_rational:
            raise ArithmeticError("norm is not rational")
        return num * (1 / norm.rational_part)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        out = ExtScalar._raw({1: mpq(1)})
        for _ in range(abs(n)):
            out = out * base
        return out

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self.is_rational:
            return hash(self.rational_part)
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"ExtScalar({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k in sorted(self._terms, key=lambda k: (k != 1, k)):
            v = self._terms[k]
            parts.append(str(v) if k == 1 else f"{v}*sqrt({k})")
        return " + ".join(parts)


Scalar = Union[Rational, ExtScalar]


def is_rational(x) -> bool:
    return not isinstance(x, ExtScalar) or x.is_rational


def demote(x):
    """Return a rational-valued ExtScalar as an ``mpq``; other values unchanged."""
    if isinstance(x, ExtScalar) and x.is_rational:
        return x.rational_part
    return x


def sqrt_exact(q) -> ExtScalar:
    """A square root of the nonzero rational ``q``; the other root is its negative."""
    q = Q(q)
    if not q:
        raise DomainError("square root of zero requested")
    num, den = int(q.numerator), int(q.denominator)
    sf, outer = normalize_radicand(num * den)
    return ExtScalar({sf: mpq(outer, den)})


def leading_sign(x) -> int:
    """Sign of the first nonzero coefficient in canonical term order (1 first)."""
    if isinstance(x, ExtScalar):
        terms = x.terms
        if not terms:
            return 0
        first = min(terms, key=lambda k: (k != 1, k))
        return 1 if terms[first] > 0 else -1
    x = Q(x)
    return (x > 0) - (x < 0)


def sort_key(x):
    """Total order used for deterministic tie-breaking (rationals compare by value)."""
    if isinstance(x, ExtScalar) and not x.is_rational:
        terms = x.terms
        return (1, tuple(sorted((k, terms[k]) for k in terms)))
    return (0, Q(demote(x)))


def common_field(values) -> tuple[int, ...]:
    """Radicands generating a field that holds every value, at most two of them."""
    keys = set()
    for v in values:
        if isinstance(v, ExtScalar):
            keys.update(v.radicands)
    return _field_generators(keys)


# text forms ------------------------------------------------------------


def scalar_to_json(x):
    x = demote(x)
    if isinstance(x, ExtScalar):
        c, gens = x.coefficients()
        out = {f"c{i}": str(v) for i, v in enumerate(c) if v}
        for i, g in enumerate(gens, start=1):
            out[f"s{i}"] = g
        return out
    return str(Q(x))


def scalar_from_json(obj):
    if isinstance(obj, dict):
        unknown = set(obj) - {"c0", "c1", "c2", "c3", "s1", "s2"}
        if any(re.fullmatch(r"[cs]\d+", k) for k in unknown):
            raise UnsupportedExtension(f"fields {sorted(unknown)} need more than two radicands")
        if unknown:
            raise ValueError(f"unknown scalar fields {sorted(unknown)}")
        gens = [obj[k] for k in ("s1", "s2") if k in obj]
        for g in gens:
            if not isinstance(g, int) or isinstance(g, bool):
                raise ValueError(f"radicand must be an integer, got {g!r}")
            sf, outer = normalize_radicand(g)
            if outer != 1 or sf == 1:
                raise ValueError(f"radicand {g} is not square-free")
        if len(gens) == 2 and gens[0] == gens[1]:
            raise ValueError("radicands must be distinct")
        c = [obj.get(f"c{i}", "0") for i in range(4)]
        if any(Q(v) for v in c[len(gens) + 1 if len(gens) < 2 else 4 :]):
            raise UnsupportedExtension("coefficient given for a missing radicand")
        return demote(ExtScalar.from_coefficients(c, gens))
    if isinstance(obj, bool):
        raise ValueError("bool is not a scalar")
    if isinstance(obj, (int, str)):
        return Q(obj)
    raise ValueError(f"cannot parse scalar from {obj!r}")

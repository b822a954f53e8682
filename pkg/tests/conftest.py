from __future__ import annotations

import random

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import settings

from bileonard.linalg import Matrix, inverse
from bileonard.scalars import ExtScalar

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def to_sympy(M: Matrix) -> sympy.Matrix:
    def conv(c):
        if isinstance(c, ExtScalar):
            return sum(sympy.Rational(int(v.numerator), int(v.denominator)) * sympy.sqrt(k) for k, v in c.terms.items())
        return sympy.Rational(int(c.numerator), int(c.denominator))

    return sympy.Matrix([[conv(c) for c in row] for row in M.rows()])


def random_rational(rng: random.Random, lo: int = -9, hi: int = 9, den: int = 6) -> mpq:
    while True:
        q = mpq(rng.randint(lo, hi), rng.randint(1, den))
        if q:
            return q


def random_invertible(rng: random.Random, n: int, spread: int = 2) -> Matrix:
    while True:
        P = Matrix([[mpq(rng.randint(-spread, spread)) for _ in range(n)] for _ in range(n)])
        if P.rank() == n:
            return P


def conjugate_all(P: Matrix, mats) -> tuple:
    Pinv = inverse(P)
    return tuple(P @ m @ Pinv for m in mats)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)

"""Dense exact matrices, characteristic polynomials and spectral idempotents.

Entries are exact scalars (``mpq`` or :class:`~bileonard.scalars.ExtScalar`).
Rows and columns are indexed ``0..n-1``; a basis is stored as the columns of
a matrix, so ``P^{-1} M P`` is ``M`` written in the basis ``P``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from gmpy2 import mpq

from .scalars import ExtScalar, Q, Rational, demote, is_rational, sort_key


class LinAlgError(ArithmeticError):
    pass


class SingularMatrixError(LinAlgError):
    pass


class SpectrumError(LinAlgError):
    """Eigenvalues do not lie in the scalar field, repeat, or mismatch an ordering."""


def _coerce(x):
    if isinstance(x, ExtScalar):
        return demote(x)
    return Q(x)


ZERO = mpq(0)
ONE = mpq(1)


class Matrix:
    """Square (or rectangular) exact matrix; treated as an immutable value."""

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows, *, _trusted=False):
        if _trusted:
            self._rows = rows
        else:
            self._rows = [[_coerce(v) for v in row] for row in rows]
        self.nrows = len(self._rows)
        self.ncols = len(self._rows[0]) if self._rows else 0
        if not _trusted and any(len(r) != self.ncols for r in self._rows):
            raise ValueError("ragged rows")

    # constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> Matrix:
        m = n if m is None else m
        return cls([[ZERO] * m for _ in range(n)], _trusted=True)

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], _trusted=True)

    @classmethod
    def diag(cls, values) -> Matrix:
        values = [_coerce(v) for v in values]
        n = len(values)
        return cls([[values[i] if i == j else ZERO for j in range(n)] for i in range(n)], _trusted=True)

    @classmethod
    def from_columns(cls, columns) -> Matrix:
        columns = [list(c) for c in columns]
        return cls([[_coerce(c[i]) for c in columns] for i in range(len(columns[0]))], _trusted=True)

    # access -----------------------------------------------------------

    @property
    def order(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("matrix is not square")
        return self.nrows

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def rows(self) -> list[list]:
        return [list(r) for r in self._rows]

    def row(self, i: int) -> list:
        return list(self._rows[i])

    def column(self, j: int) -> list:
        return [r[j] for r in self._rows]

    def columns(self) -> list[list]:
        return [self.column(j) for j in range(self.ncols)]

    def diagonal(self) -> list:
        return [self._rows[i][i] for i in range(min(self.shape))]

    def transpose(self) -> Matrix:
        return Matrix([list(c) for c in zip(*self._rows)], _trusted=True)

    @property
    def T(self) -> Matrix:
        return self.transpose()

    def flatten(self) -> list:
        return [v for r in self._rows for v in r]

    def is_zero(self) -> bool:
        return not any(v for r in self._rows for v in r)

    def is_rational(self) -> bool:
        return all(is_rational(v) for r in self._rows for v in r)

    def map(self, fn) -> Matrix:
        return Matrix([[fn(v) for v in r] for r in self._rows])

    # arithmetic -------------------------------------------------------

    def _check_same(self, other: Matrix):
        if not isinstance(other, Matrix):
            raise TypeError("matrix operand expected")
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other)
        return Matrix(
            [[demote(a + b) for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)],
            _trusted=True,
        )

    def __sub__(self, other):
        self._check_same(other)
        return Matrix(
            [[demote(a - b) for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)],
            _trusted=True,
        )

    def __neg__(self):
        return Matrix([[-a for a in r] for r in self._rows], _trusted=True)

    def __mul__(self, c):
        if isinstance(c, Matrix):
            raise TypeError("use @ for matrix products")
        c = _coerce(c)
        return Matrix([[demote(a * c) for a in r] for r in self._rows], _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = _coerce(c)
        if not c:
            raise ZeroDivisionError("matrix divided by zero")
        return self * (1 / c)

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = range(other.ncols)
        orows = other._rows
        out = []
        for r in self._rows:
            acc = [ZERO] * other.ncols
            for k, a in enumerate(r):
                if a:
                    ok = orows[k]
                    for j in cols:
                        b = ok[j]
                        if b:
                            acc[j] = acc[j] + a * b
            out.append([demote(v) for v in acc])
        return Matrix(out, _trusted=True)

    def __pow__(self, k: int) -> Matrix:
        out = Matrix.identity(self.order)
        for _ in range(k):
            out = out @ self
        return out

    def apply(self, vec) -> list:
        return [demote(sum((a * b for a, b in zip(r, vec) if a and b), ZERO)) for r in self._rows]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for r, s in zip(self._rows, other._rows) for a, b in zip(r, s)
        )

    __hash__ = None

    def __repr__(self):
        body = "; ".join(", ".join(str(v) for v in r) for r in self._rows)
        return f"Matrix([{body}])"

    # derived quantities -----------------------------------------------

    def trace(self):
        return trace(self)

    def rank(self) -> int:
        return rank(self)

    def inverse(self) -> Matrix:
        return inverse(self)


def trace(M: Matrix):
    return demote(sum(M.diagonal(), ZERO))


# elimination ------------------------------------------------------------


def _row_reduce(rows: list[list], ncols: int):
    """In-place reduced row echelon form on the first ``ncols`` columns.

    Any further columns are carried along; returns the pivot columns.
    """
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [demote(v * inv) if v else ZERO for v in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [demote(a - f * b) if b else a for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def rank(M: Matrix) -> int:
    rows = M.rows()
    return len(_row_reduce(rows, M.ncols))


def nullspace(M: Matrix) -> list[list]:
    """Basis of ``{v : M v = 0}``; each vector has a 1 in its free coordinate."""
    rows = M.rows()
    pivots = _row_reduce(rows, M.ncols)
    free = [c for c in range(M.ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * M.ncols
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = demote(-rows[r][f])
        basis.append(v)
    return basis


def inverse(M: Matrix) -> Matrix:
    n = M.order
    rows = [r + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(M.rows())]
    pivots = _row_reduce(rows, n)
    if len(pivots) < n:
        raise SingularMatrixError("matrix is singular")
    return Matrix([r[n:] for r in rows], _trusted=True)


@dataclass
class LinearSolution:
    """Outcome of :func:`solve_linear`.

    ``solution`` is one particular solution (free unknowns set to zero) and
    ``null_basis`` spans the homogeneous solutions.  When the system is
    inconsistent ``certificate`` holds multipliers ``y`` with ``y A = 0`` and
    ``y b != 0``.
    """

    consistent: bool
    solution: list | None = None
    null_basis: list = field(default_factory=list)
    certificate: list | None = None
    certificate_value: object = None

    @property
    def unique(self) -> bool:
        return self.consistent and not self.null_basis


def solve_linear(A: Matrix, b) -> LinearSolution:
    """Solve ``A u = b`` exactly (``A`` may be rectangular)."""
    m, n = A.shape
    b = [_coerce(v) for v in b]
    if len(b) != m:
        raise ValueError("right-hand side length mismatch")
    # track row operations to produce an inconsistency certificate
    rows = [A.row(i) + [b[i]] + [ONE if i == j else ZERO for j in range(m)] for i in range(m)]
    pivots = _row_reduce(rows, n)
    for r in range(len(pivots), m):
        if rows[r][n]:
            return LinearSolution(
                consistent=False,
                certificate=rows[r][n + 1 :],
                certificate_value=rows[r][n],
            )
    sol = [ZERO] * n
    for r, p in enumerate(pivots):
        sol[p] = rows[r][n]
    null = nullspace(A)
    return LinearSolution(consistent=True, solution=sol, null_basis=null)


def column_span_rank(mats) -> int:
    """Rank of the given matrices as vectors (each flattened to one column)."""
    return rank(Matrix.from_columns([m.flatten() for m in mats]))


# polynomials ------------------------------------------------------------
# A polynomial is a list of coefficients, lowest degree first.


def char_poly(M: Matrix) -> list:
    """Coefficients of ``det(lambda I - M)``, lowest degree first.

    Faddeev-LeVerrier recurrence; its only divisions are by the integers
    ``1..n``, so it is exact over any field of characteristic zero.
    """
    n = M.order
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    Mk = Matrix.zeros(n)
    ident = Matrix.identity(n)
    for k in range(1, n + 1):
        Mk = M @ Mk + ident * coeffs[n - k + 1]
        coeffs[n - k] = demote(-trace(M @ Mk) / k)
    return coeffs


def poly_eval(p: list, x):
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return demote(acc)


def poly_from_roots(roots) -> list:
    p = [ONE]
    for r in roots:
        q = [ZERO] * (len(p) + 1)
        for i, c in enumerate(p):
            q[i + 1] = q[i + 1] + c
            q[i] = demote(q[i] - r * c)
        p = q
    return p


def _deflate(p: list, r) -> list:
    # divide by (lambda - r); assumes r is a root
    n = len(p) - 1
    q = [ZERO] * n
    acc = ZERO
    for i in range(n, 0, -1):
        acc = demote(acc * r + p[i])
        q[i - 1] = acc
    return q


def _divisors(n: int) -> list[int]:
    from .scalars import _trial_factor

    divs = [1]
    for p, e in _trial_factor(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def _integer_coeffs(p: list) -> list[int]:
    den = 1
    for c in p:
        den = den * int(c.denominator) // _gcd(den, int(c.denominator))
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = _gcd(g, abs(c))
    return [c // g for c in ints]


def _vanishes_at(ints: list[int], a: int, b: int) -> bool:
    # homogeneous Horner for sum ints[i] a^i b^(n-i)
    acc, bpow = 0, 1
    for c in reversed(ints):
        acc = acc * a + c * bpow
        bpow *= b
    return acc == 0


def _find_root(p: list):
    ints = _integer_coeffs(p)
    lead, const = abs(ints[-1]), abs(ints[0])
    # Cauchy bound on the absolute value of any root
    bound = 1 + max(mpq(abs(c), lead) for c in ints[:-1])
    for b in _divisors(lead):
        for a in _divisors(const):
            if a > bound * b:
                break
            if _gcd(a, b) != 1:
                continue
            for s in (1, -1):
                if _vanishes_at(ints, s * a, b):
                    return mpq(s * a, b)
    return None


def rational_roots(p: list) -> list[tuple[Rational, int]]:
    """All rational roots of ``p`` with multiplicities (rational root theorem)."""
    p = [Q(c) for c in p]
    while len(p) > 1 and not p[-1]:
        p.pop()
    roots: dict = {}
    zero_mult = 0
    while len(p) > 1 and not p[0]:
        p = p[1:]
        zero_mult += 1
    if zero_mult:
        roots[ZERO] = zero_mult
    while len(p) > 1:
        r = _find_root(p)
        if r is None:
            break
        while len(p) > 1 and poly_eval(p, r) == 0:
            roots[r] = roots.get(r, 0) + 1
            p = _deflate(p, r)
    return sorted(roots.items(), key=lambda t: t[0])


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def rational_eigenvalues(M: Matrix) -> list[tuple]:
    """Eigenvalues of ``M`` with multiplicities, when the spectrum splits.

    Rational characteristic polynomials use the rational root theorem.  A
    polynomial with radical coefficients is handled when ``M / sqrt(k)`` has a
    rational characteristic polynomial for one radicand ``k`` appearing in it;
    the eigenvalues are then ``sqrt(k)`` times rationals.
    """
    poly = char_poly(M)
    n = M.order
    keys = set()
    for c in poly + M.flatten():
        if isinstance(c, ExtScalar):
            keys.update(k for k in c.terms if k != 1)
    roots, scale = None, None
    for k in [1] + sorted(keys):
        s = ExtScalar.sqrt_of(k) if k != 1 else ONE
        # coefficient of lambda^j scales by s^(n-j)
        scaled = [demote(c / s ** (n - j)) for j, c in enumerate(poly)]
        if all(is_rational(c) for c in scaled):
            found = rational_roots(scaled)
            if sum(m for _, m in found) == n:
                roots, scale = found, (None if k == 1 else s)
                break
    if roots is None:
        raise SpectrumError("characteristic polynomial does not split over the scalar field")
    if scale is not None:
        roots = [(demote(r * scale), m) for r, m in roots]
    return roots


@dataclass
class SpectralData:
    eigenvalues: list
    idempotents: list

    def check(self, M: Matrix) -> bool:
        n = M.order
        total = Matrix.zeros(n)
        recon = Matrix.zeros(n)
        for i, (t, e) in enumerate(zip(self.eigenvalues, self.idempotents)):
            total = total + e
            recon = recon + e * t
            if M @ e != e * t:
                return False
            for j, f in enumerate(self.idempotents):
                prod = e @ f
                if (prod != e) if i == j else not prod.is_zero():
                    return False
        return total == Matrix.identity(n) and recon == M


def primitive_idempotents(M: Matrix, ordering) -> SpectralData:
    """Lagrange-product idempotents ``e_i = prod_{j != i} (M - t_j)/(t_i - t_j)``."""
    n = M.order
    ordering = [_coerce(t) for t in ordering]
    if len(ordering) != n:
        raise SpectrumError(f"ordering has {len(ordering)} values for order {n}")
    for a, b in combinations(ordering, 2):
        if a == b:
            raise SpectrumError("repeated eigenvalue in ordering")
    ident = Matrix.identity(n)
    shifted = [M - ident * t for t in ordering]
    # minimal polynomial must divide prod (lambda - t_j)
    prod = ident
    for s in shifted:
        prod = prod @ s
    if not prod.is_zero():
        raise SpectrumError("ordering does not match the spectrum")
    idems = []
    for i, ti in enumerate(ordering):
        e = ident
        for j, tj in enumerate(ordering):
            if j != i:
                e = (e @ shifted[j]) / (ti - tj)
        if e.is_zero():
            raise SpectrumError(f"{ti} is not an eigenvalue")
        idems.append(e)
    return SpectralData(list(ordering), idems)


def eigenvector(M: Matrix, theta) -> list:
    """A nonzero vector of the one-dimensional ``theta``-eigenspace."""
    null = nullspace(M - Matrix.identity(M.order) * theta)
    if len(null) != 1:
        raise SpectrumError(f"eigenspace for {theta} has dimension {len(null)}")
    return null[0]


def eigenbasis(M: Matrix, ordering) -> Matrix:
    """Columns are eigenvectors for ``ordering`` (first nonzero coordinate scaled to 1)."""
    cols = []
    for t in ordering:
        v = eigenvector(M, t)
        lead = next(c for c in v if c)
        cols.append([demote(c / lead) for c in v])
    return Matrix.from_columns(cols)


# tridiagonal structure ---------------------------------------------------

BIPARTITE = "bipartite"
ALMOST_FIRST = "almost_bipartite_first"
ALMOST_LAST = "almost_bipartite_last"
OTHER = "other"


@dataclass
class TridiagonalProfile:
    is_tridiagonal: bool
    is_irreducible: bool
    diagonal: list
    cls: str

    @property
    def is_bipartite(self) -> bool:
        return self.cls == BIPARTITE

    @property
    def is_almost_bipartite(self) -> bool:
        return self.cls in (ALMOST_FIRST, ALMOST_LAST)


def diagonal_class(diagonal) -> str:
    """bipartite / almost_bipartite_first / almost_bipartite_last / other."""
    d = len(diagonal) - 1
    if not any(diagonal):
        return BIPARTITE
    if d >= 1 and not any(diagonal[1:d]):
        first, last = bool(diagonal[0]), bool(diagonal[d])
        if first != last:
            return ALMOST_FIRST if first else ALMOST_LAST
    return OTHER


def tridiagonal_profile(M: Matrix) -> TridiagonalProfile:
    n = M.order
    tri = all(not M[i, j] for i in range(n) for j in range(n) if abs(i - j) > 1)
    irreducible = tri and all(M[i, i + 1] and M[i + 1, i] for i in range(n - 1))
    diagonal = M.diagonal()
    cls = diagonal_class(diagonal) if tri else OTHER
    return TridiagonalProfile(tri, irreducible, diagonal, cls)


def order_key(x):
    return sort_key(x)

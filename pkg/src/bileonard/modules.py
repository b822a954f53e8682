"""Finite-dimensional irreducible modules: construction, spectra, bases, classification.

The five families are ``B(d)`` (``d`` even) and ``AB(d, n)`` for ``n`` in
``{0, x, y, z}``.  Matrices act on column vectors; column ``i`` holds the
image of the basis vector ``v_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .algebra import (
    CHARACTERS,
    GENERATORS,
    INDEX,
    Automorphism,
    check_generator,
    check_index,
    check_relations_xy,
    check_relations_xyz,
    h_matrix,
    hat,
)
from .linalg import (
    Matrix,
    SpectrumError,
    _row_reduce,
    eigenvector,
    inverse,
    primitive_idempotents,
    rational_eigenvalues,
    trace,
)
from .scalars import ExtScalar, Q, demote, is_rational, sort_key


class InvalidModuleType(ValueError):
    pass


class NotCanonicalModule(ValueError):
    """Matrices that do not match any of the five families."""


@dataclass(frozen=True)
class ModuleType:
    kind: str  # "B" or "AB"
    d: int
    n: str | None = None

    def __post_init__(self):
        if self.kind not in ("B", "AB"):
            raise InvalidModuleType(f"kind must be B or AB, got {self.kind!r}")
        if not isinstance(self.d, int) or self.d < 0:
            raise InvalidModuleType(f"diameter must be a nonnegative integer, got {self.d!r}")
        if self.kind == "B":
            if self.n is not None:
                raise InvalidModuleType("type B takes no index symbol")
            if self.d % 2:
                raise InvalidModuleType(f"B(d) needs even d, got {self.d}")
        else:
            object.__setattr__(self, "n", check_index(self.n))

    @classmethod
    def B(cls, d: int) -> ModuleType:
        return cls("B", d)

    @classmethod
    def AB(cls, d: int, n: str) -> ModuleType:
        return cls("AB", d, n)

    @property
    def order(self) -> int:
        return self.d + 1

    def __str__(self):
        return f"B({self.d})" if self.kind == "B" else f"AB({self.d},{self.n})"

    def to_json(self) -> dict:
        out = {"kind": self.kind, "d": self.d}
        if self.kind == "AB":
            out["n"] = self.n
        return out

    @classmethod
    def from_json(cls, obj) -> ModuleType:
        if not isinstance(obj, dict):
            raise ValueError("module type must be an object")
        return cls(obj.get("kind"), obj.get("d"), obj.get("n"))


def all_types(d: int) -> list[ModuleType]:
    out = [ModuleType.B(d)] if d % 2 == 0 else []
    return out + [ModuleType.AB(d, n) for n in INDEX]


def types_up_to(d_max: int) -> list[ModuleType]:
    return [t for d in range(d_max + 1) for t in all_types(d)]


@dataclass
class ModuleRep:
    X: Matrix
    Y: Matrix
    Z: Matrix
    type: ModuleType | None = None
    basis: object = "constructor"  # or a pair (a, b) naming a six-basis

    @property
    def order(self) -> int:
        return self.X.order

    @property
    def d(self) -> int:
        return self.order - 1

    def gen(self, g: str) -> Matrix:
        return {"x": self.X, "y": self.Y, "z": self.Z}[check_generator(g)]

    def as_dict(self) -> dict[str, Matrix]:
        return {"x": self.X, "y": self.Y, "z": self.Z}

    def traces(self) -> tuple:
        return tuple(trace(m) for m in (self.X, self.Y, self.Z))

    def relations(self):
        return check_relations_xyz(self.X, self.Y, self.Z)

    def relations_xy(self):
        return check_relations_xy(self.X, self.Y)

    def conjugate(self, P: Matrix, basis=None) -> ModuleRep:
        """The same module written in the basis given by the columns of ``P``."""
        Pinv = inverse(P)
        return ModuleRep(
            Pinv @ self.X @ P, Pinv @ self.Y @ P, Pinv @ self.Z @ P, self.type, basis
        )

    def scaled(self, sx=1, sy=1, sz=1) -> tuple[Matrix, Matrix, Matrix]:
        return self.X * sx, self.Y * sy, self.Z * sz


# constructors ---------------------------------------------------------------


def _sgn(k: int) -> int:
    return -1 if k % 2 else 1


def _b_matrices(d: int) -> tuple[Matrix, Matrix, Matrix]:
    n = d + 1
    X, Y, Z = (Matrix.zeros(n).rows() for _ in range(3))
    for i in range(n):
        X[i][i] = mpq(_sgn(i) * (d - 2 * i))
        if i >= 1:
            Y[i - 1][i] = mpq(d - i + 1)
            Z[i - 1][i] = mpq(_sgn(i - 1) * (d - i + 1))
        if i <= d - 1:
            Y[i + 1][i] = mpq(i + 1)
            Z[i + 1][i] = mpq(_sgn(i) * (i + 1))
    return Matrix(X), Matrix(Y), Matrix(Z)


def _ab0_matrices(d: int) -> tuple[Matrix, Matrix, Matrix]:
    # v_{d+1} = v_d folds the last subdiagonal term onto the diagonal
    n = d + 1
    X, Y, Z = (Matrix.zeros(n).rows() for _ in range(3))
    sd = _sgn(d)
    for i in range(n):
        X[i][i] = mpq(_sgn(d + i) * (2 * d - 2 * i + 1))
        if i >= 1:
            Y[i - 1][i] = mpq(sd * (2 * d - i + 2))
            Z[i - 1][i] = mpq(_sgn(i - 1) * (2 * d - i + 2))
        j = min(i + 1, d)
        Y[j][i] += sd * (i + 1)
        Z[j][i] += _sgn(i) * (i + 1)
    return Matrix(X), Matrix(Y), Matrix(Z)


def construct(t: ModuleType) -> ModuleRep:
    if t.kind == "B":
        X, Y, Z = _b_matrices(t.d)
    else:
        X, Y, Z = _ab0_matrices(t.d)
        # AB(d, n) is AB(d, 0) with each generator multiplied by f_n
        fx, fy, fz = CHARACTERS[t.n]
        X, Y, Z = X * fx, Y * fy, Z * fz
    return ModuleRep(X, Y, Z, t, "constructor")


@dataclass
class ReducibleB:
    module: ModuleRep
    V1: Matrix  # columns v_i + v_{d-i}
    V2: Matrix  # columns v_i - v_{d-i}

    def residuals(self) -> dict[str, Matrix]:
        """Components of ``g V_k`` outside ``V_k``; all zero when invariant."""
        out = {}
        for name, basis in (("V1", self.V1), ("V2", self.V2)):
            for g, G in self.module.as_dict().items():
                out[f"{g}{name}"] = _outside_span(basis, G @ basis)
        return out

    def is_decomposition(self) -> bool:
        both = Matrix.from_columns(self.V1.columns() + self.V2.columns())
        return both.rank() == self.module.order and all(
            r.is_zero() for r in self.residuals().values()
        )


def _outside_span(basis: Matrix, image: Matrix) -> Matrix:
    # residual of projecting the columns of image onto span(basis)
    from .linalg import solve_linear

    cols = []
    for v in image.columns():
        sol = solve_linear(basis, v)
        if sol.consistent:
            cols.append([mpq(0)] * len(v))
        else:
            cols.append(v)
    return Matrix.from_columns(cols)


def construct_reducible_B(d: int) -> ReducibleB:
    if d % 2 == 0 or d < 0:
        raise InvalidModuleType(f"the reducible B construction needs odd d, got {d}")
    X, Y, Z = _b_matrices(d)
    n = d + 1
    half = (d + 1) // 2
    v1, v2 = [], []
    for i in range(half):
        plus = [mpq(0)] * n
        minus = [mpq(0)] * n
        plus[i] += 1
        plus[d - i] += 1
        minus[i] += 1
        minus[d - i] -= 1
        v1.append(plus)
        v2.append(minus)
    return ReducibleB(
        ModuleRep(X, Y, Z, None, "constructor"),
        Matrix.from_columns(v1),
        Matrix.from_columns(v2),
    )


# invariants ---------------------------------------------------------------------


def evaluate_h(n, M: ModuleRep) -> Matrix:
    return h_matrix(n, M.X, M.Y, M.Z)


def h_trace(n, M: ModuleRep):
    return trace(evaluate_h(n, M))


def h_traces(M: ModuleRep) -> tuple:
    return tuple(h_trace(n, M) for n in INDEX)


def expected_traces(t: ModuleType) -> tuple[int, int, int]:
    if t.kind == "B":
        return (0, 0, 0)
    s = _sgn(t.d) * (t.d + 1)
    return tuple(s * f for f in CHARACTERS[t.n])


def expected_h_traces(t: ModuleType) -> tuple[int, int, int, int]:
    if t.kind == "B":
        return (0, 0, 0, 0)
    s = _sgn(t.d) * (t.d + 1)
    return tuple(3 * s if m == t.n else -s for m in INDEX)


def classify_by_traces(M: ModuleRep) -> ModuleType:
    """Type from the order and the trace triple (matrices assumed irreducible)."""
    d = M.d
    traces = M.traces()
    for t in all_types(d):
        if tuple(mpq(v) for v in expected_traces(t)) == traces:
            return t
    raise NotCanonicalModule(
        f"trace triple ({', '.join(str(v) for v in traces)}) at order {d + 1} matches no module type"
    )


def _span_closure(vectors: list[list], gens: list[Matrix]) -> int:
    """Dimension of the smallest subspace containing ``vectors`` and closed under ``gens``."""
    basis: list[list] = []

    def add(v) -> bool:
        rows = [list(b) for b in basis] + [list(v)]
        return len(_row_reduce(rows, len(v))) > len(basis)

    queue = []
    for v in vectors:
        if add(v):
            basis.append(v)
            queue.append(v)
    while queue:
        v = queue.pop()
        for G in gens:
            w = G.apply(v)
            if any(w) and add(w):
                basis.append(w)
                queue.append(w)
    return len(basis)


def is_irreducible(M: ModuleRep) -> bool:
    """Irreducibility test.

    When ``x`` has a simple spectrum every submodule is a sum of ``x``-eigenlines,
    so it is enough that each eigenvector generates the whole space.  Otherwise
    fall back on Burnside: the matrices must generate the full matrix algebra.
    """
    n = M.order
    gens = [M.X, M.Y, M.Z]
    try:
        spectrum = rational_eigenvalues(M.X)
    except SpectrumError:
        spectrum = None
    if spectrum is not None and all(m == 1 for _, m in spectrum):
        return all(
            _span_closure([eigenvector(M.X, t)], gens) == n for t, _ in spectrum
        )
    flat = [Matrix.identity(n)]
    frontier = [Matrix.identity(n)]
    rows: list[list] = []
    basis = 0

    def add(m: Matrix) -> bool:
        nonlocal basis
        trial = [list(r) for r in rows] + [m.flatten()]
        r = len(_row_reduce(trial, n * n))
        if r > basis:
            rows.append(m.flatten())
            basis = r
            return True
        return False

    add(flat[0])
    while frontier and basis < n * n:
        nxt = []
        for W in frontier:
            for G in gens:
                P = G @ W
                if add(P):
                    nxt.append(P)
        frontier = nxt
    return basis == n * n


# spectra ---------------------------------------------------------------------


def theta(t: ModuleType, g: str, i: int) -> int:
    """The ``i``-th tabulated eigenvalue of generator ``g`` on type ``t``."""
    d = t.d
    if t.kind == "B":
        return _sgn(i) * (d - 2 * i)
    base = _sgn(d + i) * (2 * d - 2 * i + 1)
    return CHARACTERS[t.n][GENERATORS.index(check_generator(g))] * base


def eig_table(t: ModuleType) -> dict[str, list]:
    return {g: [mpq(theta(t, g, i)) for i in range(t.d + 1)] for g in GENERATORS}


def eig_tables(M: ModuleRep) -> dict[str, list]:
    t = M.type if M.type is not None else classify_by_traces(M)
    return eig_table(t)


def adjacent(a, b) -> bool:
    """``a`` and ``b`` are distinct and ``b`` is ``2 - a`` or ``-2 - a``."""
    return a != b and (b == 2 - a or b == -2 - a)


def is_standard(seq) -> bool:
    return all(adjacent(a, b) for a, b in zip(seq, seq[1:]))


class NotConnected(ValueError):
    pass


def _endpoint_key(v):
    if is_rational(v):
        q = Q(demote(v))
        return (0, abs(q), q)
    return (-1, sort_key(v))


def standard_ordering(values) -> list:
    """Order a finite set so that consecutive entries are adjacent.

    The path is walked from the endpoint of larger absolute value (larger
    value on ties), which reproduces the tabulated orderings.
    """
    vals = []
    for v in values:
        v = demote(v) if isinstance(v, ExtScalar) else Q(v)
        if v not in vals:
            vals.append(v)
    if not vals:
        raise NotConnected("empty set")
    if len(vals) == 1:
        return vals
    nbrs = {i: [j for j, w in enumerate(vals) if adjacent(v, w)] for i, v in enumerate(vals)}
    if any(len(js) > 2 for js in nbrs.values()):
        raise NotConnected("adjacency graph is not a path")
    ends = [i for i, js in nbrs.items() if len(js) == 1]
    if len(ends) != 2:
        raise NotConnected("values cannot be ordered as a path under adjacency")
    start = max(ends, key=lambda i: _endpoint_key(vals[i]))
    order, prev, cur = [start], None, start
    while True:
        nxt = [j for j in nbrs[cur] if j != prev]
        if not nxt:
            break
        prev, cur = cur, nxt[0]
        order.append(cur)
    if len(order) != len(vals):
        raise NotConnected("values cannot be ordered as a path under adjacency")
    return [vals[i] for i in order]


def spectral_data(M: ModuleRep, g: str):
    return primitive_idempotents(M.gen(g), eig_tables(M)[g])


# six bases and representation matrices -------------------------------------------


def _normalized(v: list) -> list:
    lead = next(c for c in v if c)
    return [demote(c / lead) for c in v]


def seed_vector(M: ModuleRep, b: str, idempotent: Matrix | None = None) -> list:
    """A spanning vector of ``e_0^b V`` with first nonzero coordinate 1."""
    e0 = idempotent if idempotent is not None else spectral_data(M, b).idempotents[0]
    col = next((c for c in e0.columns() if any(c)), None)
    if col is None:
        raise SpectrumError(f"e_0^{b} vanishes")
    return _normalized(col)


def six_bases(M: ModuleRep, a: str, b: str, seed: list | None = None) -> Matrix:
    """Columns ``e_i^a v^b`` for ``0 <= i <= d``."""
    a, b = check_generator(a), check_generator(b)
    if a == b:
        raise ValueError("six_bases needs two distinct generators")
    ea = spectral_data(M, a).idempotents
    v = seed if seed is not None else seed_vector(M, b)
    cols = [e.apply(v) for e in ea]
    for i, c in enumerate(cols):
        if not any(c):
            raise ArithmeticError(f"e_{i}^{a} v^{b} vanished")
    P = Matrix.from_columns(cols)
    if P.rank() != M.order:
        raise ArithmeticError("six-basis columns are dependent")
    return P


def representation_in_basis(M: ModuleRep, a: str, b: str) -> ModuleRep:
    P = six_bases(M, a, b)
    return M.conjugate(P, basis=(a, b))


def _third(a: str, b: str) -> str:
    return next(g for g in GENERATORS if g not in (a, b))


def closed_form_rep(t: ModuleType, a: str, b: str) -> ModuleRep:
    """Matrices of ``x, y, z`` in the basis ``e_i^a v^b`` from the closed forms."""
    a, b = check_generator(a), check_generator(b)
    if a == b:
        raise ValueError("need two distinct generators")
    c = _third(a, b)
    d = t.d
    n = d + 1
    A, Bm, C = (Matrix.zeros(n).rows() for _ in range(3))
    if t.kind == "B":
        for i in range(n):
            A[i][i] = mpq(_sgn(i) * (d - 2 * i))
            if i >= 1:
                Bm[i - 1][i] = mpq(d - i + 1)
                C[i - 1][i] = mpq(_sgn(i - 1) * (d - i + 1))
            if i <= d - 1:
                Bm[i + 1][i] = mpq(i + 1)
                C[i + 1][i] = mpq(_sgn(i) * (i + 1))
    else:
        ha, hb, hc = hat(a, t.n), hat(b, t.n), hat(c, t.n)
        sb = hb * _sgn(d)
        for i in range(n):
            A[i][i] = mpq(ha * _sgn(d + i) * (2 * d - 2 * i + 1))
            if i >= 1:
                Bm[i - 1][i] = mpq(sb * (2 * d - i + 2))
                C[i - 1][i] = mpq(hc * _sgn(i - 1) * (2 * d - i + 2))
            j = min(i + 1, d)
            Bm[j][i] += sb * (i + 1)
            C[j][i] += hc * _sgn(i) * (i + 1)
    mats = {a: Matrix(A), b: Matrix(Bm), c: Matrix(C)}
    return ModuleRep(mats["x"], mats["y"], mats["z"], t, (a, b))


# twisting -----------------------------------------------------------------------


def twist(M: ModuleRep, sigma: Automorphism) -> ModuleRep:
    """``g`` acts on the twisted module as ``sigma^{-1}(g)`` acts on ``M``."""
    mats = sigma.inverse().apply(M.as_dict())
    return ModuleRep(mats["x"], mats["y"], mats["z"], twist_type(M.type, sigma) if M.type else None, M.basis)


def twist_type(t: ModuleType, sigma: Automorphism) -> ModuleType:
    if t.kind == "B":
        return t
    return ModuleType.AB(t.d, sigma(t.n))


def stabilizer(t: ModuleType) -> list[Automorphism]:
    from .algebra import all_automorphisms

    return [s for s in all_automorphisms() if twist_type(t, s) == t]


# canonical basis and isomorphism ---------------------------------------------------


@dataclass
class CanonicalBasis:
    """A basis in which the module's matrices equal the constructor's."""

    type: ModuleType
    P: Matrix
    epsilon: int
    delta: int | None = None


def _x_start(M: ModuleRep) -> tuple:
    spectrum = rational_eigenvalues(M.X)
    if any(m != 1 for _, m in spectrum):
        raise NotCanonicalModule("x has a repeated eigenvalue")
    order = standard_ordering([t for t, _ in spectrum])
    d = len(order) - 1
    if d == 0:
        t0 = order[0]
        return t0, (int(t0) if t0 in (1, -1) else 1)
    # start at the end adjacent to a value outside the spectrum
    for seq in (order, order[::-1]):
        t0, t1 = seq[0], seq[1]
        eps = 1 if t1 == 2 - t0 else -1
        if -2 * eps - t0 not in order and t0 not in (1, -1):
            return t0, eps
    raise NotCanonicalModule("no end of the x-spectrum is free")


def canonical_basis(M: ModuleRep) -> CanonicalBasis:
    """Build ``v_0..v_d`` from an extremal ``x``-eigenvector by the ladder recursion."""
    d = M.d
    t0, eps = _x_start(M)
    X, Y, Z = M.X, M.Y, M.Z
    eY = Y - Z * eps  # y - eps z kills w_0
    pY = Y + Z * eps
    w0 = eigenvector(X, t0)
    if any(eY.apply(w0)):
        raise NotCanonicalModule("(y - eps z) does not annihilate the extremal eigenvector")
    ws = [w0]
    # the odd case needs w_{d+1} to read off delta
    for i in range(1, d + 2):
        op = pY if i % 2 == 1 else eY
        ws.append([demote(c * mpq(eps, 2 * i)) for c in op.apply(ws[i - 1])])
    if Q(t0) % 2 == 0:
        if Q(t0) != eps * d:
            raise NotCanonicalModule("extremal eigenvalue does not match the diameter")
        if eps == 1:
            cols = ws[: d + 1]
        else:
            cols = [[c * _sgn(i) for c in ws[d - i]] for i in range(d + 1)]
        return CanonicalBasis(ModuleType.B(d), Matrix.from_columns(cols), eps)
    if Q(t0) % 2 != 0 and Q(t0) == eps * (2 * d + 1):
        wd, wd1 = ws[d], ws[d + 1]
        if wd1 == wd:
            delta = 1
        elif wd1 == [-c for c in wd]:
            delta = -1
        else:
            raise NotCanonicalModule("w_{d+1} is not proportional to w_d")
        cols = [[c * delta**i for c in ws[i]] for i in range(d + 1)]
        # the delta column of the type table flips when eps = -1
        row = (_sgn(d) * eps, _sgn(d) * eps * delta)
        n = {(1, 1): "0", (1, -1): "x", (-1, 1): "y", (-1, -1): "z"}[row]
        return CanonicalBasis(ModuleType.AB(d, n), Matrix.from_columns(cols), eps, delta)
    raise NotCanonicalModule("spectrum parity is inconsistent")


@dataclass
class IsomorphismResult:
    isomorphic: bool
    intertwiner: Matrix | None = None
    types: tuple = ()
    discriminant: str | None = None


def verify_intertwiner(P: Matrix, M1: ModuleRep, M2: ModuleRep) -> bool:
    if P.rank() != P.order:
        return False
    return all(P @ M1.gen(g) == M2.gen(g) @ P for g in GENERATORS)


def module_isomorphism(M1: ModuleRep, M2: ModuleRep) -> IsomorphismResult:
    """An invertible ``P`` with ``P g_1 = g_2 P`` for each generator, or a discriminant."""
    if M1.order != M2.order:
        return IsomorphismResult(False, discriminant="dimension")
    t1, t2 = classify_by_traces(M1), classify_by_traces(M2)
    if t1 != t2:
        tr1, tr2 = M1.traces(), M2.traces()
        g = next(g for g, a, b in zip(GENERATORS, tr1, tr2) if a != b)
        return IsomorphismResult(False, types=(t1, t2), discriminant=f"tr({g})")
    c1, c2 = canonical_basis(M1), canonical_basis(M2)
    if c1.type != t1 or c2.type != t2:
        raise NotCanonicalModule("ladder classification disagrees with traces")
    P = c2.P @ inverse(c1.P)
    if not verify_intertwiner(P, M1, M2):
        raise ArithmeticError("constructed intertwiner failed verification")
    return IsomorphismResult(True, P, (t1, t2))

"""Leonard pair and triple analysis.

A pair ``(A, A*)`` is a Leonard pair when some ordering of the eigenbasis of
``A`` makes ``A*`` irreducible tridiagonal and vice versa.  The ordering is
found from the support graph of ``A*`` written in an eigenbasis of ``A``: the
pair qualifies on that side exactly when this graph is a path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .linalg import (
    ALMOST_FIRST,
    ALMOST_LAST,
    BIPARTITE,
    LinearSolution,
    Matrix,
    SpectrumError,
    column_span_rank,
    diagonal_class,
    eigenbasis,
    inverse,
    rational_eigenvalues,
    solve_linear,
)
from .scalars import demote, sort_key
from .algebra import RelationReport

ALMOST = "almost_bipartite"


def coarse_class(cls: str) -> str:
    return ALMOST if cls in (ALMOST_FIRST, ALMOST_LAST) else cls


@dataclass
class SideAnalysis:
    """One operator diagonalized, the other written in that eigenbasis."""

    ok: bool
    theta: list | None = None  # eigenvalues in path order
    basis: Matrix | None = None  # eigenvectors as columns, same order
    other: Matrix | None = None  # the other operator in this basis
    reason: str | None = None

    @property
    def reversed_theta(self) -> list | None:
        return None if self.theta is None else self.theta[::-1]


def _path_order(T: Matrix) -> list[int] | None:
    n = T.order
    nbrs = {i: set() for i in range(n)}
    for i in range(n):
        for j in range(n):
            if i != j and (T[i, j] or T[j, i]):
                nbrs[i].add(j)
    if n == 1:
        return [0]
    ends = [i for i in range(n) if len(nbrs[i]) == 1]
    if any(len(s) > 2 or not s for s in nbrs.values()) or len(ends) != 2:
        return None
    order, prev, cur = [ends[0]], None, ends[0]
    while True:
        nxt = [j for j in nbrs[cur] if j != prev]
        if not nxt:
            break
        prev, cur = cur, nxt[0]
        order.append(cur)
    return order if len(order) == n else None


def _orient(order: list[int], values: list) -> list[int]:
    # of the two orientations keep the one whose first eigenvalue is larger
    if len(order) > 1 and sort_key(values[order[-1]]) > sort_key(values[order[0]]):
        return order[::-1]
    return order


def diagonalize_against(A: Matrix, other: Matrix, spectrum=None) -> SideAnalysis:
    if spectrum is None:
        try:
            spectrum = rational_eigenvalues(A)
        except SpectrumError as exc:
            return SideAnalysis(False, reason=str(exc))
    if any(m != 1 for _, m in spectrum):
        return SideAnalysis(False, reason="repeated eigenvalues")
    values = [t for t, _ in spectrum]
    P = eigenbasis(A, values)
    T = inverse(P) @ other @ P
    order = _path_order(T)
    if order is None:
        return SideAnalysis(False, reason="support graph is not a path")
    order = _orient(order, values)
    Pord = Matrix.from_columns([P.column(i) for i in order])
    Tord = Matrix([[T[i, j] for j in order] for i in order])
    n = T.order
    if any(not Tord[i, i + 1] or not Tord[i + 1, i] for i in range(n - 1)):
        return SideAnalysis(False, reason="tridiagonal form is not irreducible")
    return SideAnalysis(True, [values[i] for i in order], Pord, Tord)


@dataclass
class AWParams:
    beta: object
    gamma: object
    gamma_star: object
    rho: object
    rho_star: object
    omega: object
    eta: object
    eta_star: object
    unique: bool = True

    NAMES = ("beta", "gamma", "gamma_star", "rho", "rho_star", "omega", "eta", "eta_star")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.NAMES}

    def values(self) -> list:
        return [getattr(self, k) for k in self.NAMES]


@dataclass
class PairAnalysis:
    A: Matrix
    A_star: Matrix
    d: int
    is_leonard: bool
    theta: list | None = None
    theta_star: list | None = None
    a_diag: list | None = None  # diagonal of A in the A*-eigenbasis
    a_star_diag: list | None = None  # diagonal of A* in the A-eigenbasis
    bip_class: str | None = None
    dual_bip_class: str | None = None
    aw: AWParams | None = None
    is_BI: bool | None = None
    reason: str | None = None
    side: SideAnalysis | None = None
    dual_side: SideAnalysis | None = None

    @property
    def orientations(self) -> tuple:
        """Both standard orderings of each eigenvalue sequence."""
        if not self.is_leonard:
            return ()
        return (
            (self.theta, self.theta[::-1]),
            (self.theta_star, self.theta_star[::-1]),
        )

    @property
    def coarse(self) -> tuple[str, str]:
        return coarse_class(self.bip_class), coarse_class(self.dual_bip_class)

    @property
    def totally_bipartite(self) -> bool:
        return self.is_leonard and self.coarse == (BIPARTITE, BIPARTITE)

    @property
    def totally_almost_bipartite(self) -> bool:
        return self.is_leonard and self.coarse == (ALMOST, ALMOST)


def analyze_pair(A: Matrix, A_star: Matrix, *, fit: bool = True) -> PairAnalysis:
    if A.shape != A_star.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {A_star.shape}")
    d = A.order - 1
    side = diagonalize_against(A, A_star)
    dual = diagonalize_against(A_star, A)
    if not side.ok or not dual.ok:
        reason = side.reason if not side.ok else dual.reason
        which = "A" if not side.ok else "A*"
        return PairAnalysis(A, A_star, d, False, reason=f"{which}: {reason}", side=side, dual_side=dual)
    a_star = side.other.diagonal()
    a = dual.other.diagonal()
    out = PairAnalysis(
        A,
        A_star,
        d,
        True,
        theta=side.theta,
        theta_star=dual.theta,
        a_diag=a,
        a_star_diag=a_star,
        bip_class=diagonal_class(a),
        dual_bip_class=diagonal_class(a_star),
        side=side,
        dual_side=dual,
    )
    out.is_BI = is_bannai_ito(out.theta)
    if fit:
        try:
            out.aw = fit_AW(out)
        except NotAWCompatible:
            out.aw = None
    return out


# Bannai/Ito test -------------------------------------------------------------


def three_term_ratios(theta: list) -> list:
    return [
        demote((theta[i - 2] - theta[i + 1]) / (theta[i - 1] - theta[i]))
        for i in range(2, len(theta) - 1)
    ]


def is_bannai_ito(theta_or_analysis) -> bool | None:
    """``None`` when the diameter is at most 2 (the ratio is undefined there)."""
    theta = theta_or_analysis.theta if isinstance(theta_or_analysis, PairAnalysis) else theta_or_analysis
    if theta is None:
        return None
    theta = [demote(t) for t in theta]
    if len(theta) - 1 <= 2:
        return None
    return all(r == -1 for r in three_term_ratios(theta))


def eigenvalue_antisymmetry(theta: list) -> bool:
    """``theta[d - i] == -theta[i]`` for every ``i``."""
    return all(demote(a + b) == 0 for a, b in zip(theta, reversed(theta)))


# Askey-Wilson parameters -------------------------------------------------------


class NotAWCompatible(ArithmeticError):
    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


def _tv_system(theta, theta_star, a, a_star):
    # unknowns: beta, gamma, gamma*, rho, rho*, omega, eta, eta*
    rows, rhs = [], []
    d = len(theta) - 1
    for i in range(1, d + 1):
        l, m = theta[i - 1], theta[i]
        rows.append([l * m, l + m, 0, 1, 0, 0, 0, 0])
        rhs.append(l * l + m * m)
        l, m = theta_star[i - 1], theta_star[i]
        rows.append([l * m, 0, l + m, 0, 1, 0, 0, 0])
        rhs.append(l * l + m * m)
    for i in range(d + 1):
        t, s = theta[i], a_star[i]
        # s((2 - beta)t^2 - 2 gamma t - rho) = gamma* t^2 + omega t + eta
        rows.append([s * t * t, 2 * s * t, t * t, s, 0, t, 1, 0])
        rhs.append(2 * s * t * t)
        t, s = theta_star[i], a[i]
        rows.append([s * t * t, t * t, 2 * s * t, 0, s, t, 0, 1])
        rhs.append(2 * s * t * t)
    return Matrix(rows), rhs


def aw_residuals(A: Matrix, As: Matrix, p: AWParams) -> dict[str, Matrix]:
    n = A.order
    I = Matrix.identity(n)
    AA, SS = A @ A, As @ As
    AS, SA = A @ As, As @ A
    r1 = (
        AA @ As - A @ As @ A * p.beta + As @ AA - (AS + SA) * p.gamma - As * p.rho
        - AA * p.gamma_star - A * p.omega - I * p.eta
    )
    r2 = (
        SS @ A - As @ A @ As * p.beta + A @ SS - (SA + AS) * p.gamma_star - A * p.rho_star
        - SS * p.gamma - As * p.omega - I * p.eta_star
    )
    return {"AW1": r1, "AW2": r2}


def fit_AW(P: PairAnalysis) -> AWParams:
    """Solve the eigenvalue/diagonal equations for the eight parameters.

    Below diameter 3 the solution is not unique; the witness with
    ``beta = -2`` is preferred when it exists and ``unique`` is False.
    """
    if not P.is_leonard:
        raise NotAWCompatible("not a Leonard pair")
    M, rhs = _tv_system(P.theta, P.theta_star, P.a_diag, P.a_star_diag)
    sol = solve_linear(M, rhs)
    if not sol.consistent:
        raise NotAWCompatible("parameter equations are inconsistent", sol.certificate)
    values = sol.solution
    unique = sol.unique
    if not unique:
        pinned = solve_linear(
            Matrix(M.rows() + [[1, 0, 0, 0, 0, 0, 0, 0]]), list(rhs) + [mpq(-2)]
        )
        if pinned.consistent:
            values = pinned.solution
    params = AWParams(*values, unique=unique)
    res = aw_residuals(P.A, P.A_star, params)
    if any(not r.is_zero() for r in res.values()):
        raise NotAWCompatible("fitted parameters do not satisfy the matrix identities")
    return params


def fit_AW_direct(A: Matrix, As: Matrix) -> LinearSolution:
    """Solve the two matrix identities entrywise for the eight parameters."""
    n = A.order
    I = Matrix.identity(n)
    AA, SS = A @ A, As @ As
    AS, SA = A @ As, As @ A
    zero = Matrix.zeros(n)
    # each identity rearranged as base = sum(param * term)
    terms1 = [A @ As @ A, AS + SA, AA, As, zero, A, I, zero]
    base1 = AA @ As + As @ AA
    terms2 = [As @ A @ As, SS, SA + AS, zero, A, As, zero, I]
    base2 = SS @ A + A @ SS
    rows, rhs = [], []
    for terms, base in ((terms1, base1), (terms2, base2)):
        flats = [t.flatten() for t in terms]
        for k, b in enumerate(base.flatten()):
            rows.append([f[k] for f in flats])
            rhs.append(b)
    return solve_linear(Matrix(rows), rhs)


def check_refined_relations(A: Matrix, As: Matrix, rho, rho_star, beta=-2) -> RelationReport:
    if A.shape != As.shape:
        raise ValueError("shape mismatch")
    AA, SS = A @ A, As @ As
    return RelationReport(
        {
            "A2A*-bAA*A+A*A2-rhoA*": AA @ As - A @ As @ A * beta + As @ AA - As * rho,
            "A*2A-bA*AA*+AA*2-rho*A": SS @ A - As @ A @ As * beta + A @ SS - A * rho_star,
        }
    )


def special_predicate(P: PairAnalysis) -> bool | None:
    """For totally almost bipartite pairs one of P(t0,t0), P(td,td) vanishes (and dually)."""
    if not P.totally_almost_bipartite or P.aw is None:
        return None
    aw = P.aw

    def poly(lam, gamma, rho):
        return demote(2 * lam * lam - aw.beta * lam * lam - 2 * gamma * lam - rho)

    t, s = P.theta, P.theta_star
    return (not poly(t[0], aw.gamma, aw.rho) or not poly(t[-1], aw.gamma, aw.rho)) and (
        not poly(s[0], aw.gamma_star, aw.rho_star) or not poly(s[-1], aw.gamma_star, aw.rho_star)
    )


# span machinery ------------------------------------------------------------------


def xspace_basis(A: Matrix, As: Matrix) -> list[Matrix]:
    return [Matrix.identity(A.order), A, As, A @ As, As @ A]


@dataclass
class Expansion:
    coefficients: list | None
    unique: bool
    certificate: list | None = None
    certificate_value: object = None

    @property
    def in_span(self) -> bool:
        return self.coefficients is not None


def _expand(basis: list[Matrix], M: Matrix) -> Expansion:
    system = Matrix.from_columns([b.flatten() for b in basis])
    sol = solve_linear(system, M.flatten())
    if not sol.consistent:
        return Expansion(None, False, sol.certificate, sol.certificate_value)
    return Expansion(sol.solution, sol.unique)


def xspace_expand(A: Matrix, As: Matrix, M: Matrix) -> Expansion:
    """Coefficients of ``M`` over ``I, A, A*, AA*, A*A``."""
    return _expand(xspace_basis(A, As), M)


def xspace_rank(A: Matrix, As: Matrix) -> int:
    return column_span_rank(xspace_basis(A, As))


def lin_independence_check(A: Matrix, As: Matrix) -> bool:
    return column_span_rank([A @ A @ As, A @ As @ A, As @ A @ A]) == 3


# triples ---------------------------------------------------------------------------

TOTALLY_BIPARTITE = "totally_bipartite"
TOTALLY_ALMOST = "totally_almost_bipartite"
MIXED = "mixed"

NAMES = ("A", "A*", "Ae")


@dataclass
class TripleAnalysis:
    d: int
    is_leonard_triple: bool
    eigenvalues: dict = field(default_factory=dict)  # name -> ordered eigenvalues
    profiles: dict = field(default_factory=dict)  # (diag, other) -> class
    cls: str = MIXED
    is_BI: bool | None = None
    bi_flags: dict = field(default_factory=dict)  # name -> flag for its eigenvalue order
    reason: str | None = None


def verify_triple(A: Matrix, As: Matrix, Ae: Matrix) -> TripleAnalysis:
    mats = dict(zip(NAMES, (A, As, Ae)))
    d = A.order - 1
    out = TripleAnalysis(d, False)
    orderings = {}
    for name, M in mats.items():
        others = [o for o in NAMES if o != name]
        try:
            spectrum = rational_eigenvalues(M)
        except SpectrumError as exc:
            out.reason = f"{name}: {exc}"
            return out
        sides = [diagonalize_against(M, mats[o], spectrum) for o in others]
        for o, s in zip(others, sides):
            if not s.ok:
                out.reason = f"{o} in the eigenbasis of {name}: {s.reason}"
                return out
        t0, t1 = sides[0].theta, sides[1].theta
        if t0 != t1 and t0 != t1[::-1]:
            out.reason = f"no single ordering of the eigenbasis of {name} works for both others"
            return out
        orderings[name] = t0
        for o, s in zip(others, sides):
            # express in the common orientation
            diag = s.other.diagonal()
            if s.theta != t0:
                diag = diag[::-1]
            out.profiles[(name, o)] = diagonal_class(diag)
    out.is_leonard_triple = True
    out.eigenvalues = orderings
    coarse = {coarse_class(c) for c in out.profiles.values()}
    if coarse == {BIPARTITE}:
        out.cls = TOTALLY_BIPARTITE
    elif coarse == {ALMOST}:
        out.cls = TOTALLY_ALMOST
    out.bi_flags = {name: is_bannai_ito(theta) for name, theta in orderings.items()}
    flags = list(out.bi_flags.values())
    if any(f is False for f in flags):
        out.is_BI = False
    elif all(f is True for f in flags):
        out.is_BI = True
    return out

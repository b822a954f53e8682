"""Recognizing Bannai/Ito Leonard pairs and triples as modules of the algebra.

A totally bipartite or totally almost bipartite pair ``(A, A*)`` of
Bannai/Ito type becomes a module after rescaling ``x = A / xi`` and
``y = A* / xi*``; triples additionally fix ``z = A^e / xi^e``.  Isomorphism of
pairs and triples is decided through the resulting modules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .leonard import (
    MIXED,
    TOTALLY_ALMOST,
    PairAnalysis,
    TripleAnalysis,
    analyze_pair,
    verify_triple,
    xspace_expand,
)
from .linalg import Matrix, solve_linear, trace
from .modules import (
    ModuleRep,
    ModuleType,
    NotCanonicalModule,
    classify_by_traces,
    module_isomorphism,
)
from .scalars import ExtScalar, UnsupportedExtension, demote, is_rational, leading_sign, sqrt_exact


class RecognitionError(ValueError):
    """A precondition of recognition fails; ``certificate`` may witness it."""

    def __init__(self, message: str, certificate=None, detail=None):
        super().__init__(message)
        self.certificate = certificate
        self.detail = detail


class BelowDiameter(RecognitionError):
    pass


def _positive(x):
    x = demote(x)
    return x * leading_sign(x)


def _proportionality(target: Matrix, M: Matrix, label: str):
    """The scalar ``c`` with ``target = c * M``, or a certificate that none exists."""
    sol = solve_linear(Matrix.from_columns([M.flatten()]), target.flatten())
    if not sol.consistent:
        raise RecognitionError(
            f"{label}: no scalar multiple matches", certificate=sol.certificate, detail=sol
        )
    if not sol.unique:
        raise RecognitionError(f"{label}: the reference matrix vanishes")
    return demote(sol.solution[0])


def _ratio_on_support(L: Matrix, M: Matrix, label: str):
    # read the ratio off one entry, then insist it holds everywhere
    n = M.order
    for i in range(n):
        for j in range(n):
            if M[i, j]:
                r = demote(L[i, j] / M[i, j])
                if L != M * r:
                    raise RecognitionError(f"{label}: relation fails off the sampled entry")
                return r
    raise RecognitionError(f"{label}: zero matrix")


def _root(q, label: str):
    q = demote(q)
    if not is_rational(q):
        raise UnsupportedExtension(f"{label} = {q} is not rational; its square root is out of scope")
    return demote(sqrt_exact(q))


def module_from_scaled(A: Matrix, As: Matrix, Ae: Matrix | None, xi, xi_star, xi_eps=None) -> ModuleRep:
    """Rescale to ``x, y, z`` and check the defining relations."""
    X = A / xi
    Y = As / xi_star
    Z = (X @ Y + Y @ X) / 2 if Ae is None else Ae / xi_eps
    M = ModuleRep(X, Y, Z, None, "recognized")
    rel = M.relations()
    if not rel.ok:
        raise RecognitionError(f"rescaled matrices violate {', '.join(rel.failing())}")
    try:
        M.type = classify_by_traces(M)
    except NotCanonicalModule as exc:
        raise RecognitionError(str(exc)) from exc
    return M


# pairs -----------------------------------------------------------------------


@dataclass
class PairRecognition:
    A: Matrix
    A_star: Matrix
    analysis: PairAnalysis
    rho: object
    rho_star: object
    xi: object
    xi_star: object
    module: ModuleRep
    choice_count: int = 4

    @property
    def type(self) -> ModuleType:
        return self.module.type

    @property
    def d(self) -> int:
        return self.analysis.d

    @property
    def kind(self) -> str:
        return self.type.kind

    def invariants(self) -> tuple:
        if self.kind == "B":
            return (self.d, "B", self.rho, self.rho_star)
        return (self.d, "AB", demote(trace(self.A)), demote(trace(self.A_star)))


def _check_shape(*mats: Matrix) -> None:
    if len({m.shape for m in mats}) != 1:
        raise ValueError("matrices have different shapes")


def recognize_pair(A: Matrix, As: Matrix) -> PairRecognition:
    _check_shape(A, As)
    d = A.order - 1
    if d < 3:
        raise BelowDiameter(f"diameter {d} is below 3")
    pa = analyze_pair(A, As, fit=False)
    if not pa.is_leonard:
        raise RecognitionError(f"not a Leonard pair ({pa.reason})")
    if not (pa.totally_bipartite or pa.totally_almost_bipartite):
        raise RecognitionError(f"mixed class ({pa.bip_class}, {pa.dual_bip_class})")
    if not pa.is_BI or not analyze_pair(As, A, fit=False).is_BI:
        raise RecognitionError("eigenvalue sequences are not of Bannai/Ito type")
    AA, SS = A @ A, As @ As
    rho = _ratio_on_support(AA @ As + A @ As @ A * 2 + As @ AA, As, "rho")
    rho_star = _ratio_on_support(SS @ A + As @ A @ As * 2 + A @ SS, A, "rho*")
    if not rho or not rho_star:
        raise RecognitionError("rho or rho* vanishes")
    if pa.totally_almost_bipartite:
        xi = _positive(trace(A) / (d + 1))
        xi_star = _positive(trace(As) / (d + 1))
        if demote(4 * xi * xi) != rho or demote(4 * xi_star * xi_star) != rho_star:
            raise RecognitionError("trace scale disagrees with rho")
    else:
        xi = _positive(_root(rho, "rho") / 2)
        xi_star = _positive(_root(rho_star, "rho*") / 2)
    M = module_from_scaled(A, As, None, xi, xi_star)
    expected = "AB" if pa.totally_almost_bipartite else "B"
    if M.type.kind != expected:
        raise RecognitionError(f"module type {M.type} does not match the pair class")
    return PairRecognition(A, As, pa, rho, rho_star, xi, xi_star, M)


@dataclass
class Choice:
    signs: tuple
    xis: tuple
    module: ModuleRep

    @property
    def type(self) -> ModuleType:
        return self.module.type


def pair_choices(R: PairRecognition) -> list[Choice]:
    out = []
    for sx, sy in product((1, -1), repeat=2):
        M = module_from_scaled(R.A, R.A_star, None, R.xi * sx, R.xi_star * sy)
        out.append(Choice((sx, sy), (R.xi * sx, R.xi_star * sy), M))
    return out


def extend_pair_to_triple(R: PairRecognition, xi_eps=1) -> tuple[Matrix, Matrix, Matrix]:
    if not demote(xi_eps):
        raise ValueError("xi^e must be nonzero")
    return R.A, R.A_star, R.module.Z * xi_eps


# triples ---------------------------------------------------------------------


@dataclass
class TripleRecognition:
    mats: tuple
    analysis: TripleAnalysis
    zeta: object
    zeta_star: object
    zeta_eps: object
    xi: object
    xi_star: object
    xi_eps: object
    module: ModuleRep
    choice_count: int = 4

    @property
    def type(self) -> ModuleType:
        return self.module.type

    @property
    def d(self) -> int:
        return self.analysis.d

    @property
    def zetas(self) -> tuple:
        return (self.zeta, self.zeta_star, self.zeta_eps)

    @property
    def xis(self) -> tuple:
        return (self.xi, self.xi_star, self.xi_eps)

    def invariants(self) -> tuple:
        if self.type.kind == "B":
            return (self.d, "B") + self.zetas
        return (self.d, "AB") + tuple(demote(trace(m)) for m in self.mats)


def recognize_triple(A: Matrix, As: Matrix, Ae: Matrix) -> TripleRecognition:
    """Attempted from diameter 2 so that failures there come with a certificate."""
    _check_shape(A, As, Ae)
    d = A.order - 1
    if d < 2:
        raise BelowDiameter(f"diameter {d} is below 2")
    ta = verify_triple(A, As, Ae)
    if not ta.is_leonard_triple:
        raise RecognitionError(f"not a Leonard triple ({ta.reason})")
    if ta.cls == MIXED:
        raise RecognitionError("triple is neither totally bipartite nor totally almost bipartite")
    if ta.is_BI is False:
        raise RecognitionError("eigenvalue sequences are not of Bannai/Ito type")

    anti = A @ As + As @ A
    exp = xspace_expand(A, As, Ae)
    if not exp.in_span or any(exp.coefficients[:3]) or exp.coefficients[3] != exp.coefficients[4]:
        sol = solve_linear(Matrix.from_columns([anti.flatten()]), Ae.flatten())
        raise RecognitionError(
            "A^e is not a multiple of AA* + A*A",
            certificate=sol.certificate,
            detail={"expansion": exp, "system": sol},
        )
    zeta_eps = demote(exp.coefficients[3])
    if not zeta_eps:
        raise RecognitionError("A^e vanishes")
    zeta = _proportionality(A, As @ Ae + Ae @ As, "zeta")
    zeta_star = _proportionality(As, Ae @ A + A @ Ae, "zeta*")

    prod3 = demote(8 * zeta * zeta_star * zeta_eps)
    if ta.cls == TOTALLY_ALMOST:
        xi = _positive(trace(A) / (d + 1))
        xi_star = _positive(trace(As) / (d + 1))
    else:
        xi = _positive(_root(1 / (4 * zeta_star * zeta_eps), "xi^2"))
        xi_star = _positive(_root(1 / (4 * zeta_eps * zeta), "xi*^2"))
    xi_eps = demote(1 / (prod3 * xi * xi_star))
    checks = (
        (xi, 4 * zeta_star * zeta_eps),
        (xi_star, 4 * zeta_eps * zeta),
        (xi_eps, 4 * zeta * zeta_star),
    )
    if any(demote(v * v * c) != 1 for v, c in checks):
        raise RecognitionError("scales are inconsistent with the zeta values")
    M = module_from_scaled(A, As, Ae, xi, xi_star, xi_eps)
    return TripleRecognition(
        (A, As, Ae), ta, zeta, zeta_star, zeta_eps, xi, xi_star, xi_eps, M
    )


def triple_choices(R: TripleRecognition) -> list[Choice]:
    out = []
    for signs in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
        xis = tuple(v * s for v, s in zip(R.xis, signs))
        out.append(Choice(signs, xis, module_from_scaled(*R.mats, *xis)))
    return out


def zeta_from_traces(d: int, tau, tau_star, tau_eps):
    """``zeta`` of a totally almost bipartite triple from its three traces."""
    sign = -1 if d % 2 else 1
    return demote(sign * (d + 1) * tau / (2 * tau_star * tau_eps))


# isomorphism -----------------------------------------------------------------

_INVARIANT_NAMES = {
    "B": ("d", "kind", "rho", "rho*"),
    "AB": ("d", "kind", "tr(A)", "tr(A*)"),
}
_TRIPLE_NAMES = {
    "B": ("d", "kind", "zeta", "zeta*", "zeta^e"),
    "AB": ("d", "kind", "tr(A)", "tr(A*)", "tr(A^e)"),
}


@dataclass
class IsoResult:
    isomorphic: bool
    intertwiner: Matrix | None = None
    invariants: tuple = ()
    discriminant: str | None = None
    types: tuple = field(default_factory=tuple)


def _first_difference(inv1: tuple, inv2: tuple, names: dict) -> str | None:
    labels = names[inv1[1]] if inv1[1] == inv2[1] else names["B"]
    for name, a, b in zip(labels, inv1, inv2):
        if a != b:
            return name
    return None


def _verify(P: Matrix, src: tuple, dst: tuple) -> bool:
    return P.rank() == P.order and all(P @ a == b @ P for a, b in zip(src, dst))


def pair_isomorphism(A: Matrix, As: Matrix, B: Matrix, Bs: Matrix) -> IsoResult:
    """Decide whether ``(A, A*)`` and ``(B, B*)`` are isomorphic; ``P A = B P`` when so."""
    pair1, pair2 = (A, As), (B, Bs)
    if pair1[0].order != pair2[0].order:
        return IsoResult(False, discriminant="d")
    R1, R2 = recognize_pair(*pair1), recognize_pair(*pair2)
    inv1, inv2 = R1.invariants(), R2.invariants()
    diff = _first_difference(inv1, inv2, _INVARIANT_NAMES)
    if diff:
        return IsoResult(False, invariants=(inv1, inv2), discriminant=diff, types=(R1.type, R2.type))
    M2 = module_from_scaled(R2.A, R2.A_star, None, R1.xi, R1.xi_star)
    res = module_isomorphism(R1.module, M2)
    if not res.isomorphic or not _verify(res.intertwiner, pair1, pair2):
        raise ArithmeticError("equal invariants but no verified intertwiner")
    return IsoResult(True, res.intertwiner, (inv1, inv2), types=(R1.type, M2.type))


def triple_isomorphism(A: Matrix, As: Matrix, Ae: Matrix, B: Matrix, Bs: Matrix, Be: Matrix) -> IsoResult:
    triple1, triple2 = (A, As, Ae), (B, Bs, Be)
    if triple1[0].order != triple2[0].order:
        return IsoResult(False, discriminant="d")
    R1, R2 = recognize_triple(*triple1), recognize_triple(*triple2)
    inv1, inv2 = R1.invariants(), R2.invariants()
    diff = _first_difference(inv1, inv2, _TRIPLE_NAMES)
    if diff:
        return IsoResult(False, invariants=(inv1, inv2), discriminant=diff, types=(R1.type, R2.type))
    M2 = module_from_scaled(*triple2, *R1.xis)
    res = module_isomorphism(R1.module, M2)
    if not res.isomorphic or not _verify(res.intertwiner, triple1, triple2):
        raise ArithmeticError("equal invariants but no verified intertwiner")
    return IsoResult(True, res.intertwiner, (inv1, inv2), types=(R1.type, M2.type))


# the diameter 2 example ----------------------------------------------------------


def counterexample_d2() -> tuple[Matrix, Matrix, Matrix]:
    """A totally bipartite Leonard triple at diameter 2 whose third member is
    not proportional to ``AA* + A*A``; its entries live in ``Q(i)``."""
    i = ExtScalar.sqrt_of(-1)
    A = Matrix.diag([2, 0, -2])
    As = Matrix([[0, 2, 0], [1, 0, 1], [0, 2, 0]])
    Ae = Matrix([[0, -2, 0], [1, 0, -1], [0, 2, 0]]) * i
    return A, As, Ae


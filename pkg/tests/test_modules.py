from __future__ import annotations

import random

import pytest
from gmpy2 import mpq

from bileonard.algebra import CHARACTERS, GENERATORS, INDEX, Automorphism, all_automorphisms
from bileonard.linalg import Matrix, inverse, primitive_idempotents, rank, rational_eigenvalues
from bileonard.modules import (
    InvalidModuleType,
    ModuleRep,
    ModuleType,
    NotCanonicalModule,
    NotConnected,
    all_types,
    canonical_basis,
    classify_by_traces,
    closed_form_rep,
    construct,
    construct_reducible_B,
    eig_tables,
    expected_h_traces,
    expected_traces,
    h_trace,
    h_traces,
    is_irreducible,
    is_standard,
    module_isomorphism,
    representation_in_basis,
    six_bases,
    spectral_data,
    stabilizer,
    standard_ordering,
    twist,
    types_up_to,
    verify_intertwiner,
)

from conftest import random_invertible


def sgn(k: int) -> int:
    return -1 if k % 2 else 1


def oracle(t: ModuleType) -> dict[str, Matrix]:
    """Matrices built column by column from the defining actions on v_0..v_d."""
    d = t.d
    n = d + 1

    def cols(action):
        out = [[mpq(0)] * n for _ in range(n)]
        for i in range(n):
            for j, c in action(i):
                if j == d + 1:
                    if t.kind == "B":
                        continue
                    j = d  # v_{d+1} = v_d
                if 0 <= j <= d:
                    out[j][i] += c
        return Matrix(out)

    if t.kind == "B":
        X = cols(lambda i: [(i, sgn(i) * (d - 2 * i))])
        Y = cols(lambda i: [(i - 1, d - i + 1), (i + 1, i + 1)])
        Z = cols(lambda i: [(i - 1, sgn(i - 1) * (d - i + 1)), (i + 1, sgn(i) * (i + 1))])
        return {"x": X, "y": Y, "z": Z}
    X = cols(lambda i: [(i, sgn(d + i) * (2 * d - 2 * i + 1))])
    Y = cols(lambda i: [(i - 1, sgn(d) * (2 * d - i + 2)), (i + 1, sgn(d) * (i + 1))])
    Z = cols(lambda i: [(i - 1, sgn(i - 1) * (2 * d - i + 2)), (i + 1, sgn(i) * (i + 1))])
    f = CHARACTERS[t.n]
    return {"x": X * f[0], "y": Y * f[1], "z": Z * f[2]}


TYPES12 = types_up_to(12)
TYPES8 = types_up_to(8)
PAIRS = [(a, b) for a in GENERATORS for b in GENERATORS if a != b]


@pytest.mark.parametrize("t", TYPES12, ids=str)
def test_construct_matches_action_oracle(t):
    M = construct(t)
    assert M.as_dict() == oracle(t)
    assert M.type == t and M.order == t.d + 1


def test_construct_examples():
    M = construct(ModuleType.B(2))
    assert M.X == Matrix.diag([2, 0, -2])
    assert M.Y == Matrix([[0, 2, 0], [1, 0, 1], [0, 2, 0]])
    assert M.Z == Matrix([[0, 2, 0], [1, 0, -1], [0, -2, 0]])
    M = construct(ModuleType.AB(0, "0"))
    assert (M.X, M.Y, M.Z) == (Matrix([[1]]),) * 3
    assert construct(ModuleType.AB(1, "0")).X == Matrix.diag([-3, 1])


@pytest.mark.parametrize("bad", [("B", 3, None), ("B", 2, "x"), ("AB", 2, "w"), ("AB", -1, "0"), ("C", 2, None)])
def test_invalid_types(bad):
    with pytest.raises((InvalidModuleType, ValueError)):
        ModuleType(*bad)


def test_type_counts():
    assert [len(all_types(d)) for d in range(5)] == [5, 4, 5, 4, 5]
    assert len(TYPES12) == 7 * 5 + 6 * 4


@pytest.mark.parametrize("t", TYPES12, ids=str)
def test_relations_and_irreducible(t):
    M = construct(t)
    assert M.relations().ok
    assert M.relations_xy().ok
    assert is_irreducible(M)


@pytest.mark.parametrize("t", TYPES12, ids=str)
def test_trace_tables(t):
    M = construct(t)
    d = t.d
    if t.kind == "B":
        assert M.traces() == (0, 0, 0)
        assert h_traces(M) == (0, 0, 0, 0)
    else:
        s = sgn(d) * (d + 1)
        assert M.traces() == tuple(s * f for f in CHARACTERS[t.n])
        assert h_traces(M) == tuple(3 * s if m == t.n else -s for m in INDEX)
    assert M.traces() == tuple(mpq(v) for v in expected_traces(t))
    assert h_traces(M) == tuple(mpq(v) for v in expected_h_traces(t))


def test_h_trace_examples():
    assert h_trace("0", construct(ModuleType.B(4))) == 0
    assert h_trace("y", construct(ModuleType.AB(3, "y"))) == -12
    assert h_trace("x", construct(ModuleType.AB(2, "0"))) == -3


@pytest.mark.parametrize("d", [1, 3, 5, 7, 9])
def test_reducible_B(d):
    R = construct_reducible_B(d)
    assert R.module.relations().ok
    assert R.is_decomposition()
    assert all(r.is_zero() for r in R.residuals().values())
    assert not is_irreducible(R.module)
    assert len(R.V1.columns()) == len(R.V2.columns()) == (d + 1) // 2


def test_reducible_B_rejects_even():
    with pytest.raises((InvalidModuleType, ValueError)):
        construct_reducible_B(4)


def test_classify_examples():
    M = construct(ModuleType.B(4))
    M.type = None
    assert classify_by_traces(M) == ModuleType.B(4)
    bare = construct(ModuleType.AB(3, "x"))
    assert bare.traces() == (-4, 4, 4)
    assert classify_by_traces(ModuleRep(bare.X, bare.Y, bare.Z)) == ModuleType.AB(3, "x")
    D = Matrix.diag([1, 1, 1, 1])
    with pytest.raises(NotCanonicalModule):
        classify_by_traces(ModuleRep(D, D * -1, D * -1))


@pytest.mark.parametrize("t", TYPES12, ids=str)
def test_spectra_tables(t):
    M = construct(t)
    tables = eig_tables(M)
    d = t.d
    for k, g in enumerate(GENERATORS):
        seq = tables[g]
        if t.kind == "B":
            expected = [sgn(i) * (d - 2 * i) for i in range(d + 1)]
        else:
            expected = [CHARACTERS[t.n][k] * sgn(d + i) * (2 * d - 2 * i + 1) for i in range(d + 1)]
        assert seq == expected
        assert is_standard(seq)
        assert sorted(v for v, _ in rational_eigenvalues(M.gen(g))) == sorted(expected)
        assert standard_ordering(set(seq)) == seq
        if t.kind == "B":
            assert all(seq[i] == -seq[d - i] for i in range(d + 1))
    # theta_i = (-1)^i (theta_0 - 2 eps i) for some eps = +-1
    x = tables["x"]
    assert any(all(x[i] == sgn(i) * (x[0] - 2 * e * i) for i in range(d + 1)) for e in (1, -1))


def test_spectra_examples():
    assert eig_tables(construct(ModuleType.B(4)))["x"] == [4, -2, 0, 2, -4]
    assert all(v == [5, -3, 1] for v in eig_tables(construct(ModuleType.AB(2, "0"))).values())
    assert eig_tables(construct(ModuleType.AB(2, "y")))["x"] == [-5, 3, -1]


def test_standard_ordering_examples():
    assert standard_ordering([4, -2, 0, 2, -4]) in ([4, -2, 0, 2, -4], [-4, 2, 0, -2, 4])
    assert standard_ordering([1]) == [1]
    with pytest.raises(NotConnected):
        standard_ordering([0, 5])


@pytest.mark.parametrize("t", TYPES8, ids=str)
def test_idempotent_identities(t):
    M = construct(t)
    for g in GENERATORS:
        sd = spectral_data(M, g)
        assert sd.check(M.gen(g))


@pytest.mark.parametrize("t", TYPES8, ids=str)
def test_six_bases_golden(t):
    M = construct(t)
    for a, b in PAIRS:
        P = six_bases(M, a, b)
        assert rank(P) == M.order
        R = representation_in_basis(M, a, b)
        C = closed_form_rep(t, a, b)
        assert R.as_dict() == C.as_dict(), (a, b)
        assert R.relations().ok


def test_six_bases_examples():
    for t in (ModuleType.B(4), ModuleType.AB(3, "y")):
        M = construct(t)
        P = six_bases(M, "x", "y")
        lead = next(c for c in P.column(0) if c)
        assert P / lead == Matrix.identity(M.order) or P == Matrix.identity(M.order) * lead
    M = construct(ModuleType.B(4))
    from bileonard.modules import seed_vector

    v = seed_vector(M, "y")
    P1 = six_bases(M, "x", "y", seed=v)
    P7 = six_bases(M, "x", "y", seed=[7 * c for c in v])
    assert P7 == P1 * 7
    with pytest.raises(ValueError):
        six_bases(M, "x", "x")


@pytest.mark.parametrize("d", [2, 4, 6])
def test_B_rep_display(d):
    R = representation_in_basis(construct(ModuleType.B(d)), "x", "y")
    assert R.X == Matrix.diag([sgn(i) * (d - 2 * i) for i in range(d + 1)])
    if d == 2:
        assert R.Z == Matrix([[0, 2, 0], [1, 0, -1], [0, -2, 0]])


@pytest.mark.parametrize("n", INDEX)
@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_AB_rep_corner(n, d):
    t = ModuleType.AB(d, n)
    for a, b in PAIRS:
        R = representation_in_basis(construct(t), a, b)
        B = R.gen(b)
        from bileonard.algebra import hat

        # global sign hat_b(n)(-1)^d with lower right block (d, d+1)
        s = hat(b, n) * sgn(d)
        assert B[d, d - 1] == s * d and B[d, d] == s * (d + 1)


@pytest.mark.parametrize("t", types_up_to(6), ids=str)
def test_twisting(t):
    M = construct(t)
    for s in all_automorphisms():
        T = twist(M, s)
        assert T.relations().ok
        observed = classify_by_traces(ModuleRep(T.X, T.Y, T.Z))
        expected = t if t.kind == "B" else ModuleType.AB(t.d, s(t.n))
        assert observed == expected


@pytest.mark.parametrize("n", INDEX)
def test_stabilizers(n):
    t = ModuleType.AB(3, n)
    stab = stabilizer(t)
    assert len(stab) == 6
    rho = Automorphism.rho(n)
    S = [s for s in all_automorphisms() if s("0") == "0"]
    conj = {(rho * s * rho.inverse()).perm for s in S}
    assert {s.perm for s in stab} == conj
    assert len(stabilizer(ModuleType.B(2))) == 24


@pytest.mark.parametrize("t", TYPES8, ids=str)
def test_canonical_basis_recovers_type(t):
    rng = random.Random(hash(str(t)) & 0xFFFF)
    M = construct(t)
    P = random_invertible(rng, M.order)
    C = M.conjugate(P)
    C.type = None
    cb = canonical_basis(C)
    assert cb.type == t
    assert C.conjugate(cb.P).as_dict() == M.as_dict()


def test_module_isomorphism_examples():
    M = construct(ModuleType.B(6))
    for s in all_automorphisms()[:8]:
        T = twist(M, s)
        res = module_isomorphism(M, T)
        assert res.isomorphic and verify_intertwiner(res.intertwiner, M, T)
    res = module_isomorphism(construct(ModuleType.AB(3, "0")), construct(ModuleType.AB(3, "x")))
    assert not res.isomorphic and res.discriminant == "tr(y)"
    A = construct(ModuleType.AB(4, "z"))
    res = module_isomorphism(A, A)
    assert res.isomorphic and res.intertwiner == Matrix.identity(5)


def test_module_isomorphism_random_conjugates():
    rng = random.Random(7)
    for t in types_up_to(5):
        M = construct(t)
        P = random_invertible(rng, M.order)
        N = M.conjugate(P)
        res = module_isomorphism(M, N)
        assert res.isomorphic
        assert res.intertwiner @ M.X == N.X @ res.intertwiner
        assert inverse(res.intertwiner) is not None


def test_module_isomorphism_dimension():
    res = module_isomorphism(construct(ModuleType.B(2)), construct(ModuleType.AB(3, "0")))
    assert not res.isomorphic and res.discriminant == "dimension"


def test_primitive_idempotents_respect_ordering():
    M = construct(ModuleType.AB(2, "x"))
    sd = primitive_idempotents(M.Y, eig_tables(M)["y"])
    assert sd.eigenvalues == eig_tables(M)["y"]

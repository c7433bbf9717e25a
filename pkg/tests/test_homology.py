import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import invariant_factors as sympy_factors

from conftest import HOPF, TREFOIL
from khoflow.homology import (
    HomologyGroup,
    IntChainComplex,
    IntMatrix,
    NotThin,
    format_wedge,
    infer_sigma,
    invariant_factors,
    moore_decomposition,
    parse_ring,
    rank,
    rank_mod_p,
    smith_normal_form,
    table_from_json,
    table_to_json,
)
from khoflow.khcomplex import build_complex, homology_table
from khoflow.pd import load_diagram
from oracles import rank_Fp, rank_Q

matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def _matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_snf_matches_sympy(rows):
    ours = smith_normal_form(rows).factors
    theirs = [abs(int(d)) for d in sympy_factors(sympy.Matrix(rows), domain=sympy.ZZ) if d != 0]
    assert list(ours) == sorted(theirs)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_snf_transforms(rows):
    res = smith_normal_form(rows, transforms=True)
    assert _matmul(_matmul(res.U, rows), res.V) == res.D
    assert abs(sympy.Matrix(res.U).det()) == 1
    assert abs(sympy.Matrix(res.V).det()) == 1
    diag = [d for d in res.factors]
    assert all(b % a == 0 for a, b in zip(diag, diag[1:]))
    assert tuple(diag) == invariant_factors(IntMatrix.from_dense(rows))


@settings(max_examples=60, deadline=None)
@given(matrices, st.sampled_from([2, 3, 5, 7]))
def test_ranks_match_oracles(rows, p):
    M = IntMatrix.from_dense(rows)
    assert rank(M) == rank_Q(rows)
    assert rank_mod_p(M, p) == rank_Fp(rows, p)


def test_sparse_matrix_ops():
    A = IntMatrix.from_dense([[1, 2], [0, 3]])
    B = IntMatrix.from_dense([[0, 1], [1, 0]])
    assert (A @ B).to_dense() == [[2, 1], [3, 0]]
    assert A.transpose().to_dense() == [[1, 0], [2, 3]]
    assert A.submatrix([1], [1]).to_dense() == [[3]]
    A.add(1, 1, -3)
    assert A[1, 1] == 0 and A.nnz() == 2


def test_parse_ring():
    assert parse_ring("Z") == ("Z", 0)
    assert parse_ring("q") == ("Q", 0)
    assert parse_ring("F_2") == ("F", 2)
    assert parse_ring("F7") == ("F", 7)
    assert parse_ring("Z/3") == ("F", 3)
    with pytest.raises(ValueError):
        parse_ring("F_4")
    with pytest.raises(ValueError):
        parse_ring("R")


def test_homology_group():
    g = HomologyGroup(2, (6, 2))
    assert g.torsion == (2, 6)
    assert str(g) == "Z^2 ⊕ Z/2 ⊕ Z/6"
    assert str(HomologyGroup()) == "0"
    assert HomologyGroup.from_json(g.to_json()) == g
    with pytest.raises(ValueError):
        HomologyGroup(0, (2, 3))


def test_chain_complex_torsion():
    # Z --2--> Z gives H^1 = Z/2
    cx = IntChainComplex({0: 1, 1: 1}, {0: IntMatrix.from_dense([[2]])})
    assert cx.d_squared_zero()
    assert cx.homology(0).is_zero()
    assert cx.homology(1) == HomologyGroup(0, (2,))
    assert cx.homology_mod_p(0, 2) == 1 and cx.homology_mod_p(1, 2) == 1
    assert cx.homology_mod_p(1, 3) == 0


def test_universal_coefficients(corpus):
    # dim H^i(C; F_p) = free rank + #(p | torsion in H^i) + #(p | torsion in H^{i+1})
    for name in ("3_1", "4_1", "5_1", "6_2", "L4a1"):
        cx = build_complex(load_diagram(corpus[name]["pd"]))
        Z = homology_table(cx)
        for p in (2, 3):
            Fp = homology_table(cx, "F", p)
            keys = set(Z) | set(Fp)
            for i, j in keys:
                g = Z.get((i, j), HomologyGroup())
                nxt = Z.get((i + 1, j), HomologyGroup())
                want = g.free_rank + sum(1 for d in g.torsion if d % p == 0)
                want += sum(1 for d in nxt.torsion if d % p == 0)
                assert Fp.get((i, j), HomologyGroup()).free_rank == want, (name, p, i, j)


def test_moore_strings():
    hopf = homology_table(build_complex(load_diagram(HOPF)))
    assert format_wedge(moore_decomposition(hopf)) == "S^0_0 ∨ S^0_2 ∨ S^2_4 ∨ S^2_6"
    tre = homology_table(build_complex(load_diagram(TREFOIL)))
    text = format_wedge(moore_decomposition(tre))
    assert "Σ^{-4}RP²_{-7}" in text
    assert text.count("∨") == 4
    # groups sit on the diagonals 2i - j = 1 and 3
    assert infer_sigma(tre) == 2


def test_moore_summand_count(corpus):
    for name in ("4_1", "5_2", "6_1", "7_4"):
        t = homology_table(build_complex(load_diagram(corpus[name]["pd"])))
        summands = moore_decomposition(t)
        assert len(summands) == sum(g.free_rank + len(g.torsion) for g in t.values())


def test_not_thin(corpus):
    t = homology_table(build_complex(load_diagram(corpus["8_19"]["pd"])))
    with pytest.raises(NotThin):
        moore_decomposition(t)


def test_empty_table_is_a_point():
    assert format_wedge(moore_decomposition({})) == "pt"


def test_table_json_round_trip():
    t = homology_table(build_complex(load_diagram(TREFOIL)))
    assert table_from_json(table_to_json(t)) == t

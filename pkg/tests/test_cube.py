import math

import pytest

from khoflow.cube import (
    CubeVertex,
    SignAssignment,
    count_maximal_chains,
    cube_complex,
    cube_edges,
    gauge,
    random_gauge,
    standard_sign,
    verify_sign,
)


@pytest.mark.parametrize("n", range(0, 9))
def test_standard_sign_is_a_sign_assignment(n):
    assert verify_sign(standard_sign(n))


def test_standard_sign_values():
    s = standard_sign(3)
    # s(u, i) counts the ones of u before position i
    assert s(0b000, 2) == 0
    assert s(0b001, 1) == 1
    assert s(0b011, 2) == 0
    assert s(0b001, 2) == 1
    assert s.sign(0b001, 1) == -1


def test_zero_cochain_fails():
    for n in (2, 3):
        zero = SignAssignment(n, values={e: 0 for e in cube_edges(n)})
        assert not verify_sign(zero)


@pytest.mark.parametrize("seed", range(5))
def test_gauge_keeps_the_property(seed):
    s = standard_sign(4)
    g = random_gauge(s, seed)
    assert verify_sign(g)
    t = {u: (u * 7 + seed) % 2 for u in range(16)}
    assert verify_sign(gauge(s, t))


def test_gauge_by_zero_is_identity():
    s = standard_sign(3)
    assert gauge(s, {}).values() == s.values()


@pytest.mark.parametrize("n", range(1, 7))
def test_cube_complex_is_acyclic(n):
    cx = cube_complex(n, standard_sign(n))
    assert cx.d_squared_zero()
    for w in range(n + 1):
        assert cx.homology(w).is_zero()


def test_cube_complex_of_a_point():
    cx = cube_complex(0, standard_sign(0))
    assert cx.homology(0).free_rank == 1


def test_cube_complex_under_gauge():
    cx = cube_complex(4, random_gauge(standard_sign(4), 11))
    assert cx.d_squared_zero()
    assert all(cx.homology(w).is_zero() for w in range(5))


def test_bad_sign_breaks_d_squared():
    zero = SignAssignment(3, values={e: 0 for e in cube_edges(3)})
    assert not cube_complex(3, zero).d_squared_zero()


@pytest.mark.parametrize("n", range(0, 8))
def test_maximal_chains(n):
    assert count_maximal_chains(n) == math.factorial(n)


def test_cube_vertex():
    v = CubeVertex.from_bits([1, 0, 1])
    assert v.bits == 0b101 and v.weight == 2
    assert v.as_tuple() == (1, 0, 1)
    assert len(list(cube_edges(3))) == 12

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import diagcell.linalg as L
from diagcell.linalg import (
    QQ,
    EchelonBasis,
    Matrix,
    PrimeField,
    field_from_name,
    kernel_basis,
    rank,
    rref,
    solve,
)

FIELDS = [PrimeField(2), PrimeField(5), QQ]


def test_prime_field_arithmetic():
    F = PrimeField(7)
    assert F.mul(3, 5) == 1
    assert F.inv(3) == 5
    assert F.div(1, 3) == 5
    assert F.pow(3, 6) == 1
    assert F.neg(2) == 5
    assert F.render(4) == "4 mod 7"
    assert F.parse("3/2") == F.div(3, 2)
    assert F.parse("4 mod 7") == 4
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


def test_rationals_arithmetic():
    assert QQ.render(Fraction(3, 7)) == "3/7"
    assert QQ.render(Fraction(4, 1)) == "4"
    assert QQ.parse("-3/6") == Fraction(-1, 2)
    assert QQ.inv(Fraction(2, 3)) == Fraction(3, 2)
    assert not QQ.is_unit(0)


def test_field_from_name():
    assert field_from_name("Q") is QQ
    assert field_from_name("5") == PrimeField(5)
    with pytest.raises(ValueError):
        field_from_name("6")


def test_rref_small():
    F = PrimeField(5)
    R, piv = rref(Matrix.from_rows(F, [[2, 4], [1, 2]]))
    assert piv == [0]
    assert R.tolist() == [[1, 2], [0, 0]]


def test_kernel_small_rational():
    K = kernel_basis(Matrix.from_rows(QQ, [[1, 1, 0], [0, 0, 1]]))
    assert K.tolist() == [[-1], [1], [0]]


def test_solve_inconsistent():
    F = PrimeField(3)
    m = Matrix.from_rows(F, [[1, 1], [1, 1]])
    assert solve(m, Matrix.from_rows(F, [[0], [1]])) is None
    x = solve(m, Matrix.from_rows(F, [[2], [2]]))
    assert (m @ x).tolist() == [[2], [2]]


def test_echelon_basis_grows():
    F = PrimeField(3)
    E = EchelonBasis(F, 3)
    assert E.add(np.array([[1, 2, 0], [2, 1, 0]])) == 1
    assert E.contains(np.array([2, 1, 0]))
    assert not E.contains(np.array([0, 0, 1]))
    assert E.add(np.array([[0, 1, 1]])) == 1
    assert E.rank == 2


def _random_matrix(field, rng, rows, cols, rank_hint):
    if isinstance(field, PrimeField):
        a = rng.integers(0, field.p, (rows, rank_hint))
        b = rng.integers(0, field.p, (rank_hint, cols))
        return Matrix(field, field.matmul(a, b))
    a = np.array([[Fraction(int(v)) for v in r] for r in rng.integers(-3, 4, (rows, rank_hint))], dtype=object)
    b = np.array([[Fraction(int(v)) for v in r] for r in rng.integers(-3, 4, (rank_hint, cols))], dtype=object)
    return Matrix(field, a @ b if rank_hint else field.zeros((rows, cols)))


@pytest.mark.parametrize("field", [PrimeField(2), PrimeField(3), PrimeField(65521)])
def test_blocked_elimination_matches_plain(field, monkeypatch):
    rng = np.random.default_rng(7)
    for _ in range(4):
        rows, cols = (int(x) for x in rng.integers(200, 420, 2))
        m = _random_matrix(field, rng, rows, cols, int(rng.integers(1, 200))).data.copy()
        m[rng.random(m.shape) < 0.7] = 0
        R1, p1 = L.rref_array(field, m)
        monkeypatch.setattr(L, "_BLOCKED_MIN_CELLS", 10**12)
        R2, p2 = L.rref_array(field, m)
        monkeypatch.undo()
        assert p1 == p2
        assert (R1[: len(p1)] == R2[: len(p2)]).all()


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    rows=st.integers(0, 7),
    cols=st.integers(1, 7),
    field=st.sampled_from(FIELDS),
)
def test_rank_nullity_and_rref_idempotent(seed, rows, cols, field):
    rng = np.random.default_rng(seed)
    m = _random_matrix(field, rng, rows, cols, int(rng.integers(0, min(rows, cols) + 1)))
    K = kernel_basis(m)
    assert rank(m) + K.cols == cols
    assert (m @ K).is_zero() or rows == 0
    R, piv = rref(m)
    R2, piv2 = rref(R)
    assert piv == piv2 and R == R2

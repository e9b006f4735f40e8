from fractions import Fraction

import numpy as np
import pytest
import sympy

from hassettcore.common import DimensionMismatch, NonIntegerEntry
from hassettcore.linalg import (
    ExactMatrix,
    SparseEchelon,
    determinant,
    invariant_factors,
    is_unimodular_rows,
    primitive,
    rank,
    smith_normal_form,
    solve_nonnegative,
    sparse_rank,
)


def random_matrix(rng, rows, cols, low=-3, high=4):
    return [[int(x) for x in row] for row in rng.integers(low, high, size=(rows, cols))]


def test_rank_examples():
    assert rank(ExactMatrix.identity(3)) == 3
    assert rank(ExactMatrix.zeros(3, 4)) == 0
    assert rank(ExactMatrix([[1, 2], [2, 4]])) == 1
    assert rank(ExactMatrix([])) == 0


def test_rank_with_fractions():
    m = ExactMatrix([[Fraction(1, 2), Fraction(1, 3)], [3, 2]])
    assert rank(m) == 1


def test_rank_matches_sympy_and_transpose():
    rng = np.random.default_rng(11)
    for _ in range(25):
        rows, cols = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        data = random_matrix(rng, rows, cols, -2, 3)
        m = ExactMatrix(data)
        assert rank(m) == sympy.Matrix(data).rank()
        assert rank(m.transpose()) == rank(m)


def test_rank_invariant_under_row_scaling_and_permutation():
    rng = np.random.default_rng(5)
    data = random_matrix(rng, 5, 4)
    scaled = [[Fraction(x, 3) * (i + 1) for x in row] for i, row in enumerate(data)]
    assert rank(ExactMatrix(scaled[::-1])) == rank(ExactMatrix(data))


def test_ragged_rows_rejected():
    with pytest.raises(DimensionMismatch):
        ExactMatrix([[1, 2], [3]])


def test_solve_nonnegative_examples():
    # columns are the rays (1, 0) and (1, 1)
    basis = ExactMatrix([[1, 1], [0, 1]])
    assert solve_nonnegative(basis, [2, 1]) == [1, 1]
    assert solve_nonnegative(basis, [-1, -1]) is None
    assert solve_nonnegative(basis, [0, 0]) == [0, 0]


def test_solve_nonnegative_overdetermined():
    basis = ExactMatrix([[1, 0], [0, 1], [1, 1]])
    assert solve_nonnegative(basis, [1, 2, 3]) == [1, 2]
    assert solve_nonnegative(basis, [1, 2, 4]) is None
    with pytest.raises(DimensionMismatch):
        solve_nonnegative(basis, [1, 2])


def test_smith_normal_form_examples():
    assert smith_normal_form(ExactMatrix.diagonal([2, 3])) == [1, 6]
    assert smith_normal_form(ExactMatrix.identity(3)) == [1, 1, 1]
    assert smith_normal_form(ExactMatrix([[2, 4], [6, 8]])) == [2, 4]
    assert smith_normal_form(ExactMatrix.zeros(2, 2)) == []


def test_smith_normal_form_rejects_fractions():
    with pytest.raises(NonIntegerEntry):
        smith_normal_form(ExactMatrix([[Fraction(1, 2), 1]]))


def test_invariant_factor_product_is_determinant():
    rng = np.random.default_rng(3)
    checked = 0
    while checked < 15:
        data = random_matrix(rng, 4, 4)
        det = sympy.Matrix(data).det()
        if det == 0:
            continue
        factors = smith_normal_form(ExactMatrix(data))
        assert len(factors) == 4
        assert int(np.prod([int(f) for f in factors])) == abs(int(det))
        assert all(b % a == 0 for a, b in zip(factors, factors[1:]))
        checked += 1


def test_determinant_matches_sympy():
    rng = np.random.default_rng(23)
    for size in range(1, 6):
        for _ in range(5):
            data = random_matrix(rng, size, size)
            assert determinant(ExactMatrix(data)) == int(sympy.Matrix(data).det())


def test_determinant_examples():
    assert determinant(ExactMatrix([[0, 1], [1, 0]])) == -1
    assert determinant(ExactMatrix([[1, 2], [2, 4]])) == 0
    assert determinant(ExactMatrix([[Fraction(1, 2), 0], [0, Fraction(2, 3)]])) == Fraction(1, 3)
    assert determinant(ExactMatrix([])) == 1
    with pytest.raises(DimensionMismatch):
        determinant(ExactMatrix([[1, 2]]))


def test_invariant_factors_sparse_rows():
    assert invariant_factors([{0: 1, 1: 1}, {0: 1, 1: -1}]) == [1, 2]
    assert invariant_factors([{0: 1}, {0: 1}]) == [1]


def test_unimodular_rows():
    assert is_unimodular_rows([(1, 0), (1, 1)])
    assert not is_unimodular_rows([(1, 1), (1, -1)])
    assert is_unimodular_rows([(1, 2, 3)])
    assert not is_unimodular_rows([(2, 4, 6)])
    assert not is_unimodular_rows([(1, 0), (2, 0)])


def test_primitive():
    assert primitive([2, -4, 6]) == (1, -2, 3)
    assert primitive([0, 0]) == (0, 0)
    assert primitive([1, -1]) == (1, -1)


def test_sparse_echelon_rank_and_reduction():
    echelon = SparseEchelon()
    assert echelon.add({0: 1, 2: 1})
    assert echelon.add({1: 1, 2: 1})
    assert not echelon.add({0: 2, 1: -2})
    assert echelon.rank == 2
    assert echelon.free_columns(3) == [0]
    # rows say x2 = -x0 and x1 = x0
    assert echelon.reduce({2: 1}) == {0: -1}
    assert echelon.reduce({1: 1, 2: 1}) == {}


def test_sparse_rank_matches_dense_rank():
    rng = np.random.default_rng(17)
    for _ in range(10):
        data = random_matrix(rng, 6, 5, -1, 2)
        rows = [{j: v for j, v in enumerate(row) if v} for row in data]
        assert sparse_rank(rows) == rank(ExactMatrix(data))

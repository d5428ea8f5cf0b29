import json
import random
from fractions import Fraction

import numpy as np
import pytest

from ncrat.core import (
    EchelonBasis,
    ExactMatrix,
    Scalar,
    ZERO,
    ONE,
    I,
    block_matrix,
    conjugate_transpose,
    embed,
    float_from_json,
    float_to_json,
    matrix_inverse,
    matrix_product,
    rank_factor,
    rref,
    solve_exact,
    split_blocks,
)
from ncrat.errors import DimensionMismatch, SingularMatrixError

from conftest import random_invertible, random_scalar


class TestScalar:
    def test_field_axioms_on_random_triples(self):
        rng = random.Random(1)
        for _ in range(200):
            a, b, c = (random_scalar(rng) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a + b == b + a
            assert a * b == b * a
            if a:
                assert a * a.inverse() == ONE
                assert a.inverse() * a == ONE

    def test_units_and_conjugation(self):
        assert I * I == Scalar(-1)
        assert I.conjugate() == Scalar(0, -1)
        s = Scalar(Fraction(1, 2), Fraction(-3, 4))
        assert s.conjugate().conjugate() == s
        assert (s / s) == ONE

    def test_parse_and_json(self):
        s = Scalar.from_json(["1/2", "-3/4"])
        assert s == Scalar(Fraction(1, 2), Fraction(-3, 4))
        assert Scalar.from_json(s.to_json()) == s

    def test_zero_division(self):
        with pytest.raises(ZeroDivisionError):
            ZERO.inverse()


class TestMatrixProduct:
    def test_identity(self):
        m = ExactMatrix.from_rows([[1, 2], [3, 4]])
        assert matrix_product(ExactMatrix.identity(2), m) == m

    def test_matrix_units(self):
        e12 = ExactMatrix.unit(2, 0, 1)
        e21 = ExactMatrix.unit(2, 1, 0)
        assert e12 * e21 == ExactMatrix.unit(2, 0, 0)

    def test_polynomial_evaluation_by_hand(self):
        # 3*A1*A2 - A1^2 at the standard pair gives [[9,-4],[-2,1]]
        a1 = ExactMatrix.from_rows([[1, 1], [-1, 0]])
        a2 = ExactMatrix.from_rows([[1, 0], [2, -1]])
        value = (a1 * a2).scale(3) - a1 * a1
        assert value == ExactMatrix.from_rows([[9, -4], [-2, 1]])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            matrix_product(ExactMatrix.zeros(2, 3), ExactMatrix.zeros(2, 3))


class TestMatrixInverse:
    def test_unitriangular(self):
        m = ExactMatrix.from_rows([[1, 1], [0, 1]])
        assert matrix_inverse(m) == ExactMatrix.from_rows([[1, -1], [0, 1]])

    def test_identity(self):
        for n in (1, 3, 5):
            assert matrix_inverse(ExactMatrix.identity(n)) == ExactMatrix.identity(n)

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            matrix_inverse(ExactMatrix.from_rows([[1, 1], [1, 1]]))

    def test_random_inverses_up_to_size_six(self):
        rng = random.Random(7)
        for _ in range(200):
            n = rng.randint(1, 6)
            m = random_invertible(rng, n)
            inv = matrix_inverse(m)
            assert m * inv == ExactMatrix.identity(n)
            assert inv * m == ExactMatrix.identity(n)


class TestConjugateTranspose:
    def test_scalar_conjugation(self):
        m = ExactMatrix(1, 1, [I])
        assert conjugate_transpose(m) == ExactMatrix(1, 1, [Scalar(0, -1)])

    def test_antihomomorphism(self):
        rng = random.Random(3)
        for _ in range(20):
            a = ExactMatrix(3, 3, [random_scalar(rng) for _ in range(9)])
            b = ExactMatrix(3, 3, [random_scalar(rng) for _ in range(9)])
            assert conjugate_transpose(a * b) == conjugate_transpose(b) * conjugate_transpose(a)
            assert conjugate_transpose(conjugate_transpose(a)) == a

    def test_real_symmetric_fixed(self):
        m = ExactMatrix.from_rows([[2, 1], [1, 5]])
        assert conjugate_transpose(m) == m

    def test_float_matrices(self):
        a = np.array([[1j, 2], [0, 1]])
        assert np.allclose(conjugate_transpose(a), a.conj().T)


class TestEliminationHelpers:
    def test_rref_and_rank_factor(self):
        m = ExactMatrix.from_rows([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
        _, pivots = rref([m.row(i) for i in range(3)])
        assert len(pivots) == 2
        c, r = rank_factor(m)
        assert c * r == m
        assert c.cols == 2

    def test_solve_exact(self):
        a = ExactMatrix.from_rows([[1, 0], [1, 1], [0, 2]])
        x = ExactMatrix.from_rows([[1, 2], [3, -1]])
        b = a * x
        assert solve_exact(a, b) == x

    def test_solve_rank_deficient(self):
        a = ExactMatrix.from_rows([[1, 1], [2, 2]])
        with pytest.raises(SingularMatrixError):
            solve_exact(a, ExactMatrix.from_rows([[1], [2]]))

    def test_echelon_basis(self):
        basis = EchelonBasis(3)
        assert basis.add([ONE, ZERO, ONE]) is not None
        assert basis.add([ONE, ZERO, ONE]) is None
        assert basis.add([ZERO, ONE, ZERO]) is not None
        assert len(basis) == 2
        red = basis.reduce([ONE, ONE, ONE])
        assert red[0] == ZERO and red[1] == ZERO


class TestBlocksAndJson:
    def test_block_roundtrip(self):
        rng = random.Random(5)
        blocks = [
            [ExactMatrix(2, 2, [random_scalar(rng) for _ in range(4)]) for _ in range(2)]
            for _ in range(2)
        ]
        big = block_matrix(blocks)
        again = split_blocks(big, 2)
        assert again == blocks

    def test_embed(self):
        m = ExactMatrix.from_rows([[1, 2], [3, 4]])
        e = embed(m, 2)
        assert e.rows == 4
        assert e[0, 0] == Scalar(1) and e[1, 1] == Scalar(1)
        assert e[0, 2] == Scalar(2) and e[2, 0] == Scalar(3)

    def test_exact_json_roundtrip(self):
        m = ExactMatrix.from_rows([[Scalar(1, 2), Scalar(Fraction(-1, 3))], [ZERO, ONE]])
        obj = json.loads(json.dumps(m.to_json()))
        assert ExactMatrix.from_json(obj) == m

    def test_float_json_roundtrip(self):
        a = np.array([[1 + 2j, 0.5], [0, -1j]])
        b = float_from_json(json.loads(json.dumps(float_to_json(a))))
        assert np.allclose(a, b)

import random
from fractions import Fraction

import pytest

from ncrat.core import ExactMatrix, Scalar, matrix_inverse
from ncrat.errors import SingularMatrixError


def random_scalar(rng, span=4):
    return Scalar(
        Fraction(rng.randint(-span, span), rng.randint(1, 3)),
        Fraction(rng.randint(-span, span), rng.randint(1, 3)),
    )


def random_exact_matrix(rng, n, span=3):
    return ExactMatrix(
        n, n, [Scalar(rng.randint(-span, span)) for _ in range(n * n)]
    )


def random_invertible(rng, n, span=3):
    while True:
        m = random_exact_matrix(rng, n, span)
        try:
            matrix_inverse(m)
            return m
        except SingularMatrixError:
            continue


@pytest.fixture
def rng():
    return random.Random(20240817)

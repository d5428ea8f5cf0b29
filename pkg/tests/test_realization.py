import random

import pytest

from ncrat.core import ExactMatrix, Scalar
from ncrat.errors import (
    BasepointMismatch,
    DomainError,
    ResolventSingular,
    SingularConstantTerm,
)
from ncrat.ncpoly import Alphabet, Letter, NcPoly
from ncrat.ratexpr import parse_expression
from ncrat.realization import (
    BasePoint,
    BimoduleElem,
    GenPoly,
    coefficient,
    coefficient_table,
    compile_expression,
    eval_rep,
    is_zero,
    is_zero_by_enumeration,
    minimize_scalar,
    rep_add,
    rep_const,
    rep_inv,
    rep_mul,
    rep_var,
    scalar_alphabet,
    scalarize,
)

from conftest import random_invertible

L1, L2 = Letter(1, False), Letter(2, False)
BP1 = BasePoint.scalars([1, 2])
E12 = ExactMatrix.unit(2, 0, 1)
E21 = ExactMatrix.unit(2, 1, 0)
BP2x2 = BasePoint.from_mapping({L1: E12, L2: E21})


def compile_text(text, bp, g=2):
    return compile_expression(parse_expression(text, Alphabet.x(g)), bp)


def words_up_to(letters, order):
    out = [()]
    layer = [()]
    for _ in range(order):
        layer = [w + (l,) for w in layer for l in letters]
        out.extend(layer)
    return out


class TestConstructors:
    def test_const(self):
        one = ExactMatrix.identity(1)
        s = rep_const(one, BP1)
        assert s.dim == 1
        assert coefficient(s, ()).entries[0][0] == NcPoly.constant(
            scalar_alphabet(1, s.letters), 1
        )
        assert coefficient(s, (L1,)).is_zero()
        assert not is_zero(s)
        assert is_zero(rep_const(ExactMatrix.zeros(1, 1), BP1))

    def test_var(self):
        s = rep_var(L1, BP1)
        assert s.dim == 2
        galph = scalar_alphabet(1, s.letters)
        assert coefficient(s, ()).entries[0][0] == NcPoly.constant(galph, 1)
        assert coefficient(s, (L1,)).entries[0][0] == NcPoly.var(galph, 1)
        assert coefficient(s, (L1, L1)).is_zero()
        assert coefficient(s, (L2,)).is_zero()

    def test_var_matrix_point(self):
        s = rep_var(L1, BP2x2)
        c0 = coefficient(s, ()).entries
        assert ExactMatrix.from_rows(
            [[c0[i][j].coeff(()) for j in range(2)] for i in range(2)]
        ) == E12


class TestArithmeticOps:
    def test_dimensions(self):
        s1 = compile_text("X1*X2 - 1", BP1)
        s2 = compile_text("X1^-1", BP1)
        assert rep_add(s1, ExactMatrix.identity(1), s2).dim == s1.dim + s2.dim
        assert rep_mul(s1, s2).dim == s1.dim + s2.dim
        assert rep_inv(s1).dim == s1.dim + 1

    def test_basepoint_mismatch(self):
        with pytest.raises(BasepointMismatch):
            rep_add(rep_var(L1, BP1), ExactMatrix.identity(1), rep_var(L1, BasePoint.scalars([3, 3])))

    def test_add_cancellation(self):
        s = compile_text("X1*X2", BP1)
        assert is_zero(rep_add(s, ExactMatrix.scalar(1, -1), s))

    def test_add_with_zero_weight(self):
        s1 = compile_text("X1 + X2", BP1)
        s2 = compile_text("X1*X1", BP1)
        out = rep_add(s1, ExactMatrix.zeros(1, 1), s2)
        assert coefficient_table(out, 6) == coefficient_table(s1, 6)

    def test_mul_unit_law(self):
        s = compile_text("X1*X2 - X2", BP1)
        unit = rep_const(ExactMatrix.identity(1), BP1)
        assert coefficient_table(rep_mul(unit, s), 6) == coefficient_table(s, 6)

    def test_product_convolution_identity(self):
        rng = random.Random(77)
        pool = ["X1", "X2 - 1", "X1*X2", "2 + X1"]
        for _ in range(10):
            s1 = compile_text(rng.choice(pool), BP1)
            s2 = compile_text(rng.choice(pool), BP1)
            prod = rep_mul(s1, s2)
            t1 = coefficient_table(s1, 2)
            t2 = coefficient_table(s2, 2)
            tp = coefficient_table(prod, 2)
            for w in [(L1, L2), (L1, L1), (L2, L1)]:
                total = Scalar(0)
                for cut in range(3):  # the three splittings u v = w
                    u, v = w[:cut], w[cut:]
                    total = total + t1.get(u, Scalar(0)) * t2.get(v, Scalar(0))
                assert tp.get(w, Scalar(0)) == total

    def test_geometric_series_inverse(self):
        # (1 - X1)^{-1} about 0 has coefficients +1 on every power of Y1
        bp = BasePoint.scalars([0])
        s = compile_expression(parse_expression("1 - X1", 1), bp)
        inv = rep_inv(s)
        table = coefficient_table(inv, 6)
        for k in range(7):
            assert table.get(tuple([Letter(1, False)] * k)) == Scalar(1)

    def test_inverse_recursion(self):
        # [S^{-1}, w] = -sum_{uv=w, v!=w} a^{-1} [S, u] [S^{-1}, v]
        s = compile_text("1 - X1 - 2 X2 + X1*X2", BP1)
        sinv = rep_inv(s)
        a = sum((s.c[i] * s.b[i] for i in range(s.dim)), ExactMatrix.zeros(1, 1))
        a_inv = a.entries[0].inverse()
        ts = coefficient_table(s, 3)
        ti = coefficient_table(sinv, 3)
        for w in words_up_to((L1, L2), 3):
            if not w:
                continue
            total = Scalar(0)
            for cut in range(len(w)):
                u, v = w[: cut + 1], w[cut + 1 :]
                total = total - a_inv * ts.get(u, Scalar(0)) * ti.get(v, Scalar(0))
            assert ti.get(w, Scalar(0)) == total

    def test_singular_constant_term(self):
        bp = BasePoint.scalars([0])
        s = compile_expression(parse_expression("X1", 1), bp)
        with pytest.raises(SingularConstantTerm):
            rep_inv(s)

    def test_inverse_law(self):
        s = compile_text("X1", BP1)
        prod = rep_mul(s, rep_inv(s))
        assert is_zero(rep_add(prod, ExactMatrix.scalar(1, -1),
                               rep_const(ExactMatrix.identity(1), BP1)))


class TestCompile:
    def test_scalar_inverse_series(self):
        s = compile_text("X1^-1", BasePoint.scalars([1]), g=1)
        assert s.dim == 3
        table = coefficient_table(s, 8)
        for k in range(9):
            w = tuple([Letter(1, False)] * k)
            assert table.get(w) == (Scalar(1) if k % 2 == 0 else Scalar(-1))

    def test_domain_error_path(self):
        with pytest.raises(DomainError) as err:
            compile_text("X2*(X1^-1)", BasePoint.scalars([0, 1]))
        assert err.value.path == (1,)

    def test_commutator_inverse_constant_term(self):
        s = compile_text("(X1*X2 - X2*X1)^-1", BP2x2)
        c0 = coefficient(s, ()).entries
        vals = ExactMatrix.from_rows(
            [[c0[i][j].coeff(()) for j in range(2)] for i in range(2)]
        )
        assert vals == ExactMatrix.from_rows([[1, 0], [0, -1]])


class TestZeroTest:
    def test_inverse_cancellation(self):
        assert is_zero(compile_text("X1*X1^-1 - 1", BP1))

    def test_commutator_not_zero(self):
        assert not is_zero(compile_text("X1*X2 - X2*X1", BP2x2))

    def test_closure_equals_enumeration_small(self):
        reps = [
            rep_var(L1, BP1),
            rep_add(rep_var(L1, BP1), ExactMatrix.scalar(1, -1), rep_var(L1, BP1)),
            rep_const(ExactMatrix.zeros(2, 2), BP2x2),
            rep_var(L2, BP2x2),
        ]
        for rep in reps:
            assert rep.m * rep.dim <= 4
            assert is_zero(rep) == is_zero_by_enumeration(rep)


class TestScalarize:
    def test_m1_identification(self):
        s = rep_var(L1, BP1)
        sr = scalarize(s)
        assert sr.dim == s.dim
        mat = sr.A[0].to_exact()
        assert mat[0, 1] == Scalar(1)
        assert sr.A[1].nnz() == 0

    def test_state_size(self):
        s = compile_text("(X1*X2 - X2*X1)^-1", BP2x2)
        assert scalarize(s).dim == s.m * s.dim

    def test_zero_rep(self):
        s = rep_const(ExactMatrix.zeros(2, 2), BP2x2)
        sr = scalarize(s)
        assert all(a.nnz() == 0 for a in sr.A)
        assert (sr.C * sr.B).is_zero()


class TestEvalRep:
    def test_scalar_inverse(self):
        s = compile_text("X1^-1", BasePoint.scalars([1]), g=1)
        val = eval_rep(s, (ExactMatrix.from_rows([[2]]),))
        assert val == ExactMatrix.from_rows([["1/2"]])

    def test_matrix_point_value(self):
        s = compile_text("(X1*X2 - X2*X1)^-1", BP2x2)
        assert eval_rep(s, (E12, E21)) == ExactMatrix.from_rows([[1, 0], [0, -1]])

    def test_resolvent_singular(self):
        s = compile_text("X1^-1", BasePoint.scalars([1]), g=1)
        with pytest.raises(ResolventSingular):
            eval_rep(s, (ExactMatrix.zeros(1, 1),))

    def test_agrees_with_tree_evaluation(self):
        rng = random.Random(31)
        exprs = ["X1^-1", "X1*X2 - X2*X1", "(1 + X1*X2)^-1 * X1"]
        hits = 0
        for text in exprs:
            e = parse_expression(text, Alphabet.x(2))
            s = compile_expression(e, BP1)
            for _ in range(20):
                size = rng.choice([1, 2])  # m and 2m for the scalar base point
                point = {L1: random_invertible(rng, size), L2: random_invertible(rng, size)}
                try:
                    direct = e.eval(point)
                except DomainError:
                    continue
                try:
                    via_rep = eval_rep(s, (point[L1], point[L2]))
                except ResolventSingular:
                    continue
                assert via_rep == direct
                hits += 1
        assert hits >= 20

    def test_agreement_about_matrix_base_point(self):
        rng = random.Random(36)
        e = parse_expression("(X1*X2 - X2*X1)^-1", Alphabet.x(2))
        s = compile_expression(e, BP2x2)
        hits = 0
        for _ in range(20):
            size = rng.choice([2, 4])  # m and 2m
            point = {L1: random_invertible(rng, size), L2: random_invertible(rng, size)}
            try:
                direct = e.eval(point)
            except DomainError:
                continue
            try:
                via_rep = eval_rep(s, (point[L1], point[L2]))
            except ResolventSingular:
                continue
            assert via_rep == direct
            hits += 1
        assert hits >= 10


class TestMinimize:
    def test_scalar_inverse_minimal(self):
        s = compile_text("X1^-1", BasePoint.scalars([1]), g=1)
        red, nmin = minimize_scalar(s)
        assert nmin == 1

    def test_zero_series(self):
        s = compile_text("X1*X1^-1 - 1", BP1)
        _, nmin = minimize_scalar(s)
        assert nmin == 0

    def test_coefficients_preserved(self):
        s = compile_text("(1 + X1*X2)^-1", BP1)
        sr = scalarize(s)
        red, nmin = minimize_scalar(s)
        assert nmin <= sr.dim
        rng = random.Random(32)
        for _ in range(40):
            length = rng.randint(0, 5)
            word = tuple(rng.randrange(len(sr.A)) for _ in range(length))
            assert sr.word_value(word) == red.word_value(word)

    def test_equivalent_expressions_same_minimum(self):
        # X1 (X2 X1)^{-1} and (X1 X2)^{-1} X1 agree as rational functions
        a = compile_text("X1*(X2*X1)^-1", BP1)
        b = compile_text("(X1*X2)^-1*X1", BP1)
        diff = rep_add(a, ExactMatrix.scalar(1, -1), b)
        assert is_zero(diff)
        _, na = minimize_scalar(a)
        _, nb = minimize_scalar(b)
        assert na == nb


class TestCoefficientLaws:
    def test_additivity_and_words(self):
        rng = random.Random(33)
        pool = ["X1", "X1*X2", "2 - X2", "X1^-1"]
        for _ in range(8):
            s1 = compile_text(rng.choice(pool), BP1)
            s2 = compile_text(rng.choice(pool), BP1)
            a = ExactMatrix.scalar(1, rng.randint(-2, 2))
            s = rep_add(s1, a, s2)
            t, t1, t2 = (coefficient_table(x, 4) for x in (s, s1, s2))
            for w in words_up_to((L1, L2), 4):
                expect = t1.get(w, Scalar(0)) + a.entries[0] * t2.get(w, Scalar(0))
                assert t.get(w, Scalar(0)) == expect


class TestGenPoly:
    def test_eval_blocks(self):
        letters = (L1,)
        galph = scalar_alphabet(2, letters)
        # the generalized polynomial "Y_1" itself: entry (i,j) is letter y_ij
        entries = tuple(
            tuple(NcPoly.var(galph, i * 2 + j + 1) for j in range(2)) for i in range(2)
        )
        gp = GenPoly(2, letters, entries)
        point = ExactMatrix.from_rows(
            [[1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12], [13, 14, 15, 16]]
        )
        assert gp.eval((point,)) == point

    def test_degree_preserved_under_scalarization(self):
        # scalarization keeps the word-length grading: the coefficient at a
        # word of length k is homogeneous of degree k in the scalar letters
        rng = random.Random(88)
        pool = ["X1*X2*X1", "X1*X2 - X2*X1", "(X1*X2 - X2*X1)^-1"]
        for text in pool:
            s = compile_text(text, BP2x2)
            for _ in range(5):
                w = tuple(rng.choice((L1, L2)) for _ in range(rng.randint(1, 3)))
                gp = coefficient(s, w)
                if gp.is_zero():
                    continue
                assert gp.degree() == len(w)
                for row in gp.entries:
                    for p in row:
                        assert all(len(word) == len(w) for word in p.terms)

    def test_gpi_random_nonvanishing(self):
        rng = random.Random(34)
        letters = (L1, L2)
        galph = scalar_alphabet(2, letters)
        found = 0
        for _ in range(5):
            entries = tuple(
                tuple(
                    NcPoly.monomial(
                        galph,
                        rng.randint(1, 2),
                        tuple(Letter(rng.randint(1, 8), False) for _ in range(rng.randint(0, 3))),
                    )
                    for _ in range(2)
                )
                for _ in range(2)
            )
            gp = GenPoly(2, letters, entries)
            size = 2 * 2  # m * ceil((h+1)/2) with h <= 3
            for _ in range(200):
                point = tuple(
                    ExactMatrix.from_rows(
                        [[rng.randint(-2, 2) for _ in range(size)] for _ in range(size)]
                    )
                    for _ in range(2)
                )
                if not gp.eval(point).is_zero():
                    found += 1
                    break
        assert found == 5


def test_bimodule_compression_bound():
    rng = random.Random(35)
    terms = []
    for _ in range(12):
        a = ExactMatrix(2, 2, [Scalar(rng.randint(-2, 2)) for _ in range(4)])
        b = ExactMatrix(2, 2, [Scalar(rng.randint(-2, 2)) for _ in range(4)])
        terms.append((a, b))
    elem = BimoduleElem(2, L1, terms)
    assert len(elem.terms) <= 4
    assert elem == BimoduleElem(2, L1, terms[:])  # tensor equality survives
    raw = BimoduleElem(2, L1, terms[:3])
    assert (raw + (-raw)).is_zero()

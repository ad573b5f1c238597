import random
from fractions import Fraction

import pytest

from qcluster.linalg import mat
from qcluster.qtorus import (
    CentralQuotient,
    NotCentral,
    NotDivisible,
    QScalar,
    TorusAlgebra,
    TorusElement,
    TorusSeries,
    dilog_series,
    pentagon_check,
    q_binomial,
    q_int,
)

RNG = random.Random(20240809)


def rank2(eps=1):
    return TorusAlgebra(2, mat([[0, eps], [-eps, 0]]), 2, "rank2")


def random_element(alg, n_terms=3, span=2):
    out = alg.zero()
    for _ in range(n_terms):
        v = tuple(Fraction(RNG.randint(-span, span)) for _ in range(alg.rank))
        c = QScalar({Fraction(RNG.randint(-2, 2)): Fraction(RNG.randint(1, 3))})
        out = out + TorusElement(alg, {v: c})
    return out


class TestQScalar:
    def test_q_int(self):
        # [2]_q = q + q^-1
        assert q_int(2) == QScalar({Fraction(1): 1, Fraction(-1): 1})
        assert q_int(1).is_one()

    def test_q_binomial_exact(self):
        # [2 choose 1]_q = q + q^-1
        assert q_binomial(2, 1) == q_int(2)
        assert q_binomial(4, 2) == q_binomial(4, 2).bar()  # bar-invariant

    def test_divide_exact_roundtrip(self):
        for _ in range(30):
            a = QScalar({Fraction(RNG.randint(-4, 4), RNG.choice([1, 2])): Fraction(RNG.randint(-3, 3)) for _ in range(3)})
            b = QScalar({Fraction(RNG.randint(-2, 2)): Fraction(RNG.randint(1, 2)) for _ in range(2)})
            if a.is_zero() or b.is_zero():
                continue
            assert (a * b).divide_exact(b) == a

    def test_not_divisible(self):
        one = QScalar.of(1)
        with pytest.raises(NotDivisible):
            (QScalar.q_power(1) + one).divide_exact(QScalar.q_power(1) - one)


class TestTorusElement:
    def test_monomial_rule(self):
        alg = rank2()
        x1, x2 = alg.unit(0), alg.unit(1)
        prod = x1 * x2
        assert prod.terms == {(Fraction(1), Fraction(1)): QScalar.q_power(1)}

    def test_heisenberg_relation(self):
        # q^{-1} X1 X2 = q X2 X1
        alg = rank2()
        x1, x2 = alg.unit(0), alg.unit(1)
        lhs = (x1 * x2).scale(QScalar.q_power(-1))
        rhs = (x2 * x1).scale(QScalar.q_power(1))
        assert lhs == rhs

    def test_square_expansion(self):
        alg = rank2()
        x1, x2 = alg.unit(0), alg.unit(1)
        sq = (x1 + x2) * (x1 + x2)
        # cross term (q + q^-1) X_{e1+e2}
        assert sq.terms[(Fraction(1), Fraction(1))] == q_int(2)

    def test_associativity_random(self):
        alg = rank2()
        for _ in range(10):
            a, b, c = (random_element(alg) for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c

    def test_bar_antiautomorphism(self):
        alg = rank2()
        for _ in range(10):
            a, b = random_element(alg), random_element(alg)
            assert (a * b).bar() == b.bar() * a.bar()
            assert a.bar().bar() == a

    def test_central_scalar_check(self):
        alg = rank2()
        x1, x2 = alg.unit(0), alg.unit(1)
        z = x1 * x2 * alg.monomial((-1, -1))
        v = z.monomial_vector()
        assert v == (Fraction(0), Fraction(0))
        assert z.terms[v] == QScalar.q_power(1)  # q^{<e1,e2>}

    def test_left_divide(self):
        alg = rank2()
        x1, x2 = alg.unit(0), alg.unit(1)
        p = (x1 * x2).scale(QScalar.q_power(1))
        r = p.left_divide_exact(x1)
        assert x1 * r == p
        p2 = x1 * x2 + x1
        r2 = p2.left_divide_exact(x1)
        assert x1 * r2 == p2

    def test_left_divide_roundtrip_random(self):
        alg = rank2()
        for _ in range(10):
            m, r = random_element(alg, 2), random_element(alg, 3)
            if m.is_zero() or r.is_zero():
                continue
            assert (m * r).left_divide_exact(m) == r
            assert (r * m).right_divide_exact(m) == r

    def test_monomials_are_units(self):
        # dividing by a monomial always succeeds (monomials are invertible)
        alg = rank2()
        x1, x2 = alg.unit(0), alg.unit(1)
        r = (x1 + alg.one()).left_divide_exact(x2)
        assert x2 * r == x1 + alg.one()

    def test_not_divisible_witness(self):
        alg = rank2()
        x1, x2 = alg.unit(0), alg.unit(1)
        with pytest.raises(NotDivisible) as exc:
            (x1 + alg.one()).left_divide_exact(x2 + alg.one())
        assert exc.value.remainder is not None

    def test_text_roundtrip(self):
        alg = rank2()
        for _ in range(10):
            a = random_element(alg)
            assert TorusElement.from_text(alg, a.to_text()) == a


class TestCentralQuotient:
    def four_cycle(self):
        # oriented 4-cycle: <e_i, e_{i+1}> = 1
        form = mat(
            [
                [0, 1, 0, -1],
                [-1, 0, 1, 0],
                [0, -1, 0, 1],
                [1, 0, -1, 0],
            ]
        )
        return TorusAlgebra(4, form, 2, "disc")

    def test_central_vector(self):
        alg = self.four_cycle()
        q = CentralQuotient.of(alg, (2, 1, 2, 1))
        x = alg.monomial((2, 1, 2, 1))
        assert q.reduce(x) == alg.one()

    def test_non_central_raises(self):
        alg = self.four_cycle()
        with pytest.raises(NotCentral):
            CentralQuotient.of(alg, (1, 0, 0, 0))


class TestDilog:
    def test_functional_equation(self):
        # Psi(x)(1 + qx) = Psi(q^2 x) to order 8
        alg = rank2()
        x = alg.unit(0)
        n = 8
        psi = dilog_series(x, n)
        lin = TorusSeries.from_element(alg.one() + x.scale(QScalar.q_power(1)), n)
        lhs = psi * lin
        rhs = dilog_series(x.scale(QScalar.q_power(2)), n)
        assert lhs == rhs

    def test_dilog_of_zero(self):
        alg = rank2()
        assert dilog_series(alg.zero(), 6).is_one()

    def test_pentagon(self):
        assert pentagon_check(12)

    def test_inverse(self):
        alg = rank2()
        x = alg.unit(0)
        s = dilog_series(x, 8)
        assert (s * s.inverse()).is_one()

import random
from fractions import Fraction

import pytest

from qcluster.cartan import RootDatum, Word
from qcluster.mutation import (
    DivisionFailed,
    NotStandard,
    TrackedSeed,
    classical_x_transform,
    compatible_pair,
    f_polynomial_and_g_vector,
    is_identity_sequence,
    mut,
    perm,
    quantum_lift_vector,
    sequence_signature,
    standard_monomial_check,
    transport_monomial,
    tropical_transform,
)
from qcluster.quiver import Quiver, TropicalPoint
from qcluster.qtorus import QScalar
from qcluster.wordquiver import braid_move_script, chain_name, h_name, word_quiver

RNG = random.Random(99)
A2 = RootDatum.of("A2")
B2 = RootDatum.of("B2")


def rank2(eps=1):
    return Quiver.from_exchange([[0, eps], [-eps, 0]], [1, 1], frozen=[], names=["1", "2"])


def chain_quiver(n):
    """Type-A chain 0..n with arrows k+1 -> k; endpoints frozen."""
    size = n + 1
    e = [[0] * size for _ in range(size)]
    for k in range(n):
        e[k + 1][k] = 1
        e[k][k + 1] = -1
    names = [str(k) for k in range(size)]
    return Quiver.from_exchange(e, [1] * size, frozen=["0", str(n)], names=names)


def random_point(q):
    return {v: Fraction(RNG.randint(1, 30), RNG.randint(1, 30)) for v in q.names}


class TestClassical:
    def test_mutation_inverts_coordinate(self):
        q = rank2()
        pt = random_point(q)
        out = classical_x_transform(q, [mut("1")], pt)
        assert out["1"] == 1 / pt["1"]

    def test_double_mutation_identity(self):
        q = rank2()
        for _ in range(20):
            pt = random_point(q)
            out = classical_x_transform(q, [mut("1"), mut("1")], pt)
            assert out == pt

    def test_pentagon_classical(self):
        # five alternating mutations swap the coordinates; ten restore them
        q = rank2()
        five = [mut(k) for k in ("1", "2", "1", "2", "1")]
        for _ in range(10):
            pt = random_point(q)
            out = classical_x_transform(q, five, pt)
            assert out == {"1": pt["2"], "2": pt["1"]}
            out10 = classical_x_transform(q, five + [mut(k) for k in ("2", "1", "2", "1", "2")], pt)
            assert out10 == pt


class TestSignature:
    def test_pentagon_identity(self):
        # the five-term sequence closes up to the coordinate swap
        q = rank2()
        script = [mut(k) for k in ("1", "2", "1", "2", "1")] + [perm({"1": "2", "2": "1"})]
        sig = sequence_signature(q, script)
        assert sig.basis_returns
        assert len(sig.factors) == 5
        assert sig.is_identity(order=12)

    def test_double_mutation_signature(self):
        q = rank2()
        assert is_identity_sequence(q, [mut("1"), mut("1")], order=8)

    def test_corrupted_script_fails(self):
        q = rank2()
        script = [mut(k) for k in ("1", "2", "1", "2")] + [perm({"1": "2", "2": "1"})]
        sig = sequence_signature(q, script)
        assert not sig.is_identity(order=8)

    def test_tropical_transform(self):
        q = rank2()
        script = [mut(k) for k in ("1", "2", "1", "2", "1")] + [perm({"1": "2", "2": "1"})]
        for v in ("1", "2"):
            for sgn in (1, -1):
                p = TropicalPoint.of({v: sgn})
                assert tropical_transform(q, script, p) == p


class TestTrackedSeed:
    def test_one_step_matches_theorem(self):
        # A'_j = T_{f'_j} + T_{f'_j + e_j} from the initial seed
        q = rank2()
        seed = TrackedSeed.doubled(q)
        s2 = seed.mutate("1")
        f_new = s2.fmat[0]
        e_old = seed.evec["1"]
        expect = s2.alg.monomial(f_new) + s2.alg.monomial(tuple(a + b for a, b in zip(f_new, e_old)))
        assert s2.avars["1"] == expect

    def test_involution_restores(self):
        q = rank2()
        seed = TrackedSeed.doubled(q)
        s2 = seed.mutate("1").mutate("1")
        assert s2.avars["1"] == seed.avars["1"]
        assert s2.fmat == seed.fmat

    def test_bar_invariance_and_qcomm(self):
        wq = word_quiver(A2, Word.of([1, 2, 1]))
        seed = TrackedSeed.doubled(wq.quiver)
        v = chain_name(1, 1)
        s2 = seed.mutate(v)
        for name, a in s2.avars.items():
            assert a.bar() == a, name
        # pairwise q-commutation within the seed
        names = list(s2.quiver.names)[:4]
        for i, x in enumerate(names):
            for y in names[i + 1 :]:
                ax, ay = s2.avars[x], s2.avars[y]
                lam = 2 * s2.alg.pairing(s2.fmat[s2.quiver.index(x)], s2.fmat[s2.quiver.index(y)])
                assert ax * ay == (ay * ax).scale(QScalar.q_power(lam))

    def test_laurent_phenomenon_pentagon(self):
        q = rank2()
        seed = TrackedSeed.doubled(q)
        for k in ["1", "2"] * 5:
            seed = seed.mutate(k)  # DivisionFailed would raise
        assert len(seed.history) == 10

    def test_specialization_matches_classical_exchange(self):
        # classical A-exchange at q=1: A_k A'_k = prod A^[eps_jk]+ + prod A^[-eps_jk]+
        wq = word_quiver(B2, Word.of([1, 2, 1, 2]))
        q = wq.quiver
        seed = TrackedSeed.doubled(q)
        k = chain_name(1, 1)
        s2 = seed.mutate(k)
        lhs = (seed.avars[k] * s2.avars[k]).q1_terms()
        n2 = s2.alg.rank
        plus = [Fraction(0)] * n2
        minus = [Fraction(0)] * n2
        for w in q.names:
            e = q.eps(k, w)  # exponents come from the k-th row of p
            fv = seed.fmat[q.index(w)]
            if e > 0:
                plus = [a + e * b for a, b in zip(plus, fv)]
            elif e < 0:
                minus = [a - e * b for a, b in zip(minus, fv)]
        # the doubled lattice adds the complement direction to the plus side
        comp = seed.fmat[len(q.names) + q.index(k)]
        plus = [a + b for a, b in zip(plus, comp)]
        rhs = {tuple(plus): Fraction(1), tuple(minus): Fraction(1)}
        assert lhs == rhs

    def test_exchange_identity_jbar(self):
        """YZ = A_{i_l} A_{i_r} + A_{i_e} A_{ibar_e} prod_j A_j^{-C_ji} at q=1
        on random rational points, for A2 and B2 elementary configurations."""
        for rd, i in [(A2, 1), (A2, 2), (B2, 1), (B2, 2)]:
            wq = word_quiver(rd, Word.of([i, -i]))
            q = wq.quiver
            v = chain_name(i, 1)
            seed = TrackedSeed.doubled(q)
            s2 = seed.mutate(v)
            y, z = seed.avars[v], s2.avars[v]
            il, ir = chain_name(i, 0), chain_name(i, 2)
            ie, ibar_e = h_name(i, False), h_name(i, True)
            rhs = seed.avars[il] * seed.avars[ir]
            prod = seed.avars[ie] * seed.avars[ibar_e]
            for j in rd.index_set:
                if j == i:
                    continue
                aj = seed.avars[chain_name(j, 0)]
                c = -rd.cartan[i - 1][j - 1]
                for _ in range(c):
                    prod = prod * aj
            lhs_terms = (y * z).q1_terms()
            n = len(q.names)
            eps0 = q.exchange_matrix()
            for _ in range(20):
                # points of the Conf chart: principal (complement) directions = 1,
                # i.e. the e-slot values are the p-map monomials of the f-values
                yvals = [Fraction(RNG.randint(1, 20), RNG.randint(1, 20)) for _ in range(n)]
                xvals = []
                for kk in range(n):
                    val = Fraction(1)
                    for l in range(n):
                        val *= yvals[l] ** int(eps0[kk][l])
                    xvals.append(val)
                point = xvals + yvals

                def ev(terms):
                    total = Fraction(0)
                    for w, c in terms.items():
                        m = Fraction(1)
                        for x, p in zip(w, point):
                            m *= p ** int(x)
                        total += c * m
                    return total

                assert ev(lhs_terms) == ev(rhs.q1_terms()) + ev(prod.q1_terms())


class TestStandardMonomials:
    def test_zero_vector(self):
        q = rank2()
        assert standard_monomial_check(q, (Fraction(0), Fraction(0)))

    def test_negative_direction(self):
        q = Quiver.from_exchange(
            [[0, 1, 0], [-1, 0, 1], [0, -1, 0]], [1, 1, 1], frozen=["f"], names=["a", "b", "f"]
        )
        ea = q.basis_vector("a")
        # <-e_a, e_b> = -1 < 0 at the unfrozen neighbor b
        assert not standard_monomial_check(q, tuple(-x for x in ea))
        assert standard_monomial_check(q, ea)

    def test_lift_raises(self):
        from qcluster.qtorus import TorusAlgebra

        q = rank2()
        n = 2
        gram = tuple(tuple(q.pairing(q.basis[i], q.basis[j]) for j in range(n)) for i in range(n))
        alg = TorusAlgebra(n, gram, 2)
        with pytest.raises(NotStandard):
            quantum_lift_vector(alg, q, (Fraction(-1), Fraction(0)))

    def test_transport_mutated_unit(self):
        from qcluster.mutation import run_script

        wq = word_quiver(A2, Word.of([1, 2, 1]))
        moved, script, iso = braid_move_script(wq, 1)
        scr = [mut(s) for s in script] + [perm(iso)]
        end = run_script(wq.quiver, scr)
        # the moved chart's unfrozen coordinate pulls back to a Laurent monomial
        v = end.basis_vector(chain_name(2, 1))
        out = transport_monomial(wq.quiver, scr, v, RNG)
        assert out == {chain_name(1, 1): -1}

    def test_transport_non_monomial_raises(self):
        from qcluster.mutation import run_script

        wq = word_quiver(A2, Word.of([1, 2, 1]))
        moved, script, iso = braid_move_script(wq, 1)
        scr = [mut(s) for s in script] + [perm(iso)]
        end = run_script(wq.quiver, scr)
        # an H-coordinate of the moved chart is a binomial in the old chart
        with pytest.raises(NotStandard):
            transport_monomial(wq.quiver, scr, end.basis_vector(h_name(1, False)), RNG)


class TestCompatiblePairAndFPoly:
    def test_all_frozen_identity_p(self):
        q = Quiver.from_exchange([[0, 1], [-1, 0]], [1, 1], frozen=["1", "2"], names=["1", "2"])
        seed = TrackedSeed.with_f_basis(q, [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))])
        rep = compatible_pair(seed)
        assert rep["skew"] and rep["integral"]
        # Pi = d * eps-hat
        d = rep["d"]
        for i in range(2):
            for j in range(2):
                assert rep["pi"][i][j] == d * q.pairing(q.basis[i], q.basis[j])

    def test_initial_variable(self):
        q = chain_quiver(3)
        seed = TrackedSeed.doubled(q)
        f, g = f_polynomial_and_g_vector(seed, "1")
        size = len(q.names)
        assert f == {tuple([0] * size): Fraction(1)}
        assert g[q.index("1")] == 1
        assert sum(abs(x) for x in g) == 1

    def test_chain_f_polynomial(self):
        # L_1 on a type-A chain: F = 1 + y_1 + y_1 y_2 + ... + y_1...y_{n-1}
        n = 4
        q = chain_quiver(n)
        seed = TrackedSeed.doubled(q)
        for k in range(1, n):
            seed = seed.mutate(str(k))
        f, g = f_polynomial_and_g_vector(seed, str(n - 1))
        size = len(q.names)
        expect = {tuple([0] * size): Fraction(1)}
        for t in range(1, n):
            key = [0] * size
            for j in range(1, t + 1):
                key[q.index(str(j))] = 1
            expect[tuple(key)] = Fraction(1)
        assert f == expect
        # g-vector = (-1, 0, ..., 0) over the unfrozen chain directions
        assert g[q.index("1")] == -1
        unfrozen_idx = [q.index(v) for v in q.unfrozen]
        assert all(g[i] == 0 for i in unfrozen_idx if i != q.index("1"))

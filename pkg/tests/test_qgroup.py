from fractions import Fraction

import pytest

from qcluster.cartan import RootDatum, Word, longest_word
from qcluster.qtorus import QScalar
from qcluster.qgroup import (
    GeneratorSet,
    disc_realization,
    geometric_coproduct_check,
    lusztig_compare_sl2,
    lusztig_k_table,
    pbw_elements,
    pbw_z_shadow_check,
    sl2_casimir,
    verify_uq_borel,
    verify_uqg,
    w_patterns,
)

A1 = RootDatum.of("A1")
A2 = RootDatum.of("A2")
A3 = RootDatum.of("A3")
B2 = RootDatum.of("B2")
G2 = RootDatum.of("G2")


def all_pass(report):
    bad = [r for r in report if not r[1]]
    assert not bad, bad[:6]


class TestBorelPatterns:
    def test_single_letter_patterns(self):
        alg, ws, ks = w_patterns(A2, Word.of([1]))
        # level 1: chain of 2: W = X_{e1}, K = X_{e1+e2}
        assert ws[1].n_terms() == 1
        assert ks[1].n_terms() == 1

    def test_braid_word_patterns_exist(self):
        # the Borel patterns are defined for arbitrary (non-reduced) braid words
        alg, ws, ks = w_patterns(A2, Word.of([1, 2, 1, 1, 2, 1]))
        assert ws[1].n_terms() == 4 and ks[1].n_terms() == 1

    def test_serre_a2(self):
        all_pass(verify_uq_borel(A2, Word.of([1, 2, 1])))

    def test_serre_b2(self):
        all_pass(verify_uq_borel(B2, Word.of([1, 2, 1, 2])))

    def test_serre_g2(self):
        all_pass(verify_uq_borel(G2, Word.of([1, 2, 1, 2, 1, 2])))

    def test_serre_a3(self):
        all_pass(verify_uq_borel(A3, Word.of([1, 2, 1, 3, 2, 1])))

    def test_patterns_become_monomials_after_chain_mutations(self):
        # mutating 1..n-1 along a level chain turns W, K into monomials
        from qcluster.mutation import TrackedSeed
        from qcluster.quiver import Quiver

        n = 4
        size = n + 1
        e = [[0] * size for _ in range(size)]
        for k in range(n):
            e[k + 1][k] = 1
            e[k][k + 1] = -1
        names = [str(k) for k in range(size)]
        q = Quiver.from_exchange(e, [1] * size, frozen=["0", str(n)], names=names)
        from qcluster.qgroup import chain_w_pattern, x_algebra
        from qcluster.mutation import transport_monomial, mut
        import random

        alg = x_algebra(q)
        w, k = chain_w_pattern(alg, q, names)
        script = [mut(str(t)) for t in range(1, n)]
        # K is already a single monomial; W has n terms but the mutated chart
        # sees it as one: verify classically at random points
        rng = random.Random(11)
        from qcluster.mutation import classical_x_transform, run_script, eval_chart_monomial

        end = run_script(q, script)
        for _ in range(10):
            pt = {v: Fraction(rng.randint(1, 9), rng.randint(1, 9)) for v in names}
            img = classical_x_transform(q, script, pt)
            w_val = sum(
                eval_chart_monomial(q, vv, pt) * cc.eval_q1() for vv, cc in w.terms.items()
            )
            # the mutated first coordinate equals X_{e1} + X_{e1+e2} after one
            # step; after the full script W equals a single mutated-chart unit
            candidates = [eval_chart_monomial(end, end.basis_vector(v), img) for v in end.names]
            assert w_val in candidates


class TestDiscRealization:
    def test_sl2_relations(self):
        gens = disc_realization(A1)
        all_pass(verify_uqg(gens))

    def test_sl2_explicit_shape(self):
        gens = disc_realization(A1)
        assert gens.E[1].n_terms() == 2
        assert gens.F[1].n_terms() == 2
        assert gens.K[1].n_terms() == 1

    def test_sl2_casimir(self):
        gens = disc_realization(A1)
        delta = sl2_casimir(gens)
        # Delta = X_mu + X_mu^{-1} for the half-monodromy mu
        assert delta.n_terms() == 2
        vs = sorted(delta.terms)
        assert vs[0] == tuple(-x for x in vs[1])
        assert all(c == QScalar.of(1) for c in delta.terms.values())
        # Delta commutes with E, F, K in the quotient
        for g in (gens.E[1], gens.F[1], gens.K[1]):
            assert gens.equal(delta * g, g * delta)

    def test_a2_relations(self):
        gens = disc_realization(A2)
        all_pass(verify_uqg(gens))

    def test_b2_relations(self):
        gens = disc_realization(B2)
        all_pass(verify_uqg(gens))

    def test_bar_invariance(self):
        gens = disc_realization(A2)
        for i in A2.index_set:
            for g in (gens.E[i], gens.F[i], gens.K[i]):
                assert g.bar() == g


class TestCoproduct:
    def test_a2(self):
        all_pass(geometric_coproduct_check(A2, Word.of([1, 2, 1])))

    def test_b2(self):
        all_pass(geometric_coproduct_check(B2, Word.of([1, 2, 1, 2])))


class TestPBW:
    def test_a2_commutator_formula(self):
        data = pbw_elements(A2, Word.of([1, 2, 1]))
        a1, a2, a3 = data.elements
        q_minus = QScalar.q_power(1) - QScalar.q_power(-1)
        num = (a1 * a3).scale(QScalar.q_power(Fraction(1, 2))) - (a3 * a1).scale(
            QScalar.q_power(Fraction(-1, 2))
        )
        assert a2 == num.divide_scalar(q_minus)

    def test_bar_invariance(self):
        for rd, letters in [(A2, [1, 2, 1]), (A3, [1, 2, 1, 3, 2, 1])]:
            data = pbw_elements(rd, Word.of(letters))
            for el in data.elements:
                assert el.bar() == el

    def test_leading_monomials_distinct(self):
        for rd, letters in [(A2, [1, 2, 1]), (A3, [1, 2, 1, 3, 2, 1]), (A3, [2, 1, 3, 2, 1, 3])]:
            data = pbw_elements(rd, Word.of(letters))
            leads = set()
            for el in data.elements:
                q1 = el.q1_terms()
                leads.add(max(q1))
            assert len(leads) == len(data.elements)

    def test_z_shadow_relations(self):
        assert pbw_z_shadow_check(A2, Word.of([1, 2, 1]))
        assert pbw_z_shadow_check(A3, Word.of([1, 2, 1, 3, 2, 1]))
        assert pbw_z_shadow_check(A3, Word.of([2, 1, 3, 2, 1, 3]))

    def test_word_count(self):
        data = pbw_elements(A3, Word.of([1, 2, 1, 3, 2, 1]))
        assert len(data.elements) == 6

    def test_seeds_satisfy_serre(self):
        # kappa is an algebra map: the images of E_j satisfy the Serre relations
        from qcluster.qgroup import serre_relation

        data = pbw_elements(A2, Word.of([1, 2, 1]))
        e1, e2 = data.seeds[1], data.seeds[2]
        assert serre_relation(e1, e2, -1, 1).is_zero()
        assert serre_relation(e2, e1, -1, 1).is_zero()

    def test_non_simply_laced_rejected(self):
        with pytest.raises(ValueError):
            pbw_elements(B2, Word.of([1, 2, 1, 2]))


class TestLusztig:
    def test_sl2_geometric(self):
        all_pass(lusztig_compare_sl2())

    def test_k_table(self):
        assert lusztig_k_table(A2, Word.of([1, 2, 1]))
        assert lusztig_k_table(B2, Word.of([1, 2, 1, 2]))

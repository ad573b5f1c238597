from fractions import Fraction

import pytest

from qcluster.cartan import (
    NotReduced,
    RootDatum,
    Word,
    apply_move,
    beta_sequence,
    i_w,
    is_reduced,
    longest_word,
    positive_coroots,
    rho_w,
    simple_positions,
    star,
    weyl_act,
    word_move_plan,
)


def cr(rd, *coeffs):
    return tuple(Fraction(c) for c in coeffs)


class TestWeylAct:
    def test_a2_s1_on_alpha2(self):
        rd = RootDatum.of("A2")
        # s_1(a_2^vee) = a_1^vee + a_2^vee
        assert weyl_act(rd, Word.of([1]), rd.simple_coroot(2)) == cr(rd, 1, 1)

    def test_empty_word_identity(self):
        rd = RootDatum.of("B2")
        v = cr(rd, 3, -2)
        assert weyl_act(rd, Word.of([]), v) == v

    def test_s_i_negates_own_coroot(self):
        rd = RootDatum.of("A2")
        assert weyl_act(rd, Word.of([1]), rd.simple_coroot(1)) == cr(rd, -1, 0)


class TestReducedAndLongest:
    def test_a2_words(self):
        rd = RootDatum.of("A2")
        assert is_reduced(rd, Word.of([1, 2, 1]))
        assert not is_reduced(rd, Word.of([1, 1]))
        assert is_reduced(rd, Word.of([1, -2]))

    def test_longest_words(self):
        assert longest_word(RootDatum.of("A1")).letters == (1,)
        assert longest_word(RootDatum.of("A2")).letters == (1, 2, 1)
        assert len(longest_word(RootDatum.of("G2"))) == 6
        assert len(longest_word(RootDatum.of("B2"))) == 4
        assert len(longest_word(RootDatum.of("A3"))) == 6

    def test_positive_coroot_counts(self):
        assert len(positive_coroots(RootDatum.of("A2"))) == 3
        assert len(positive_coroots(RootDatum.of("B2"))) == 4
        assert len(positive_coroots(RootDatum.of("G2"))) == 6
        assert len(positive_coroots(RootDatum.of("D4"))) == 12


class TestStar:
    def test_a2_star_swaps(self):
        rd = RootDatum.of("A2")
        assert star(rd, 1) == 2 and star(rd, 2) == 1

    def test_b2_star_identity(self):
        rd = RootDatum.of("B2")
        assert star(rd, 1) == 1 and star(rd, 2) == 2

    def test_a1_star_identity(self):
        assert star(RootDatum.of("A1"), 1) == 1

    def test_star_involution_all_types(self):
        for label in ["A3", "A4", "B3", "C3", "D4", "G2"]:
            rd = RootDatum.of(label)
            for i in rd.index_set:
                assert star(rd, star(rd, i)) == i


class TestBetaSequence:
    def test_a2_longest(self):
        rd = RootDatum.of("A2")
        betas = beta_sequence(rd, Word.of([1, 2, 1]))
        assert betas == (cr(rd, 0, 1), cr(rd, 1, 1), cr(rd, 1, 0))

    def test_a4_mixed_example(self):
        # chain for (2, -2, -3, 3, -2):
        # a2+a3 (unbarred), a2 (barred), a2+a3 (barred), a3 (unbarred), a3 (barred)
        rd = RootDatum.of("A4")
        w = Word.of([2, -2, -3, 3, -2])
        betas = beta_sequence(rd, w)
        assert betas[0] == cr(rd, 0, 1, 1, 0)
        assert betas[1] == cr(rd, 0, 1, 0, 0)
        assert betas[2] == cr(rd, 0, 1, 1, 0)
        assert betas[3] == cr(rd, 0, 0, 1, 0)
        assert betas[4] == cr(rd, 0, 0, 1, 0)

    def test_single_letter(self):
        rd = RootDatum.of("B3")
        assert beta_sequence(rd, Word.of([2])) == (rd.simple_coroot(2),)

    def test_not_reduced_raises(self):
        rd = RootDatum.of("A2")
        with pytest.raises(NotReduced):
            beta_sequence(rd, Word.of([1, 1]))

    def test_distinct_and_count(self):
        rd = RootDatum.of("B2")
        w = longest_word(rd)
        betas = beta_sequence(rd, w)
        assert len(betas) == len(w)
        assert len(set(betas)) == len(betas)


class TestSimplePositionsAndIw:
    def test_a2_longest(self):
        rd = RootDatum.of("A2")
        assert simple_positions(rd, Word.of([1, 2, 1])) == (1, 3)

    def test_a1(self):
        rd = RootDatum.of("A1")
        assert simple_positions(rd, Word.of([1])) == (1,)

    def test_a4_mixed_example(self):
        rd = RootDatum.of("A4")
        assert simple_positions(rd, Word.of([2, -2, -3, 3, -2])) == (2, 4, 5)

    def test_i_w0_is_everything(self):
        for label in ["A2", "B2", "A3"]:
            rd = RootDatum.of(label)
            assert i_w(rd, longest_word(rd)) == tuple(rd.index_set)

    def test_i_w_empty_and_single(self):
        rd = RootDatum.of("A2")
        assert i_w(rd, Word.of([])) == ()
        assert i_w(rd, Word.of([1])) == (1,)
        assert rho_w(rd, Word.of([1])) == rd.simple_coroot(1)
        assert rho_w(rd, Word.of([])) == cr(rd, 0, 0)

    def test_rho_w_word_independent(self):
        rd = RootDatum.of("A2")
        assert rho_w(rd, Word.of([1, 2, 1])) == rho_w(rd, Word.of([2, 1, 2]))
        rd = RootDatum.of("B2")
        assert rho_w(rd, Word.of([1, 2, 1, 2])) == rho_w(rd, Word.of([2, 1, 2, 1]))


class TestMovePlan:
    def test_a2_single_braid(self):
        rd = RootDatum.of("A2")
        plan = word_move_plan(rd, Word.of([1, 2, 1]), Word.of([2, 1, 2]))
        assert len(plan) == 1
        assert plan[0].kind == "braid"

    def test_mixed_swap(self):
        rd = RootDatum.of("A2")
        plan = word_move_plan(rd, Word.of([1, -2]), Word.of([-2, 1]))
        assert len(plan) == 1 and plan[0].kind == "swap"

    def test_b2_single_braid(self):
        rd = RootDatum.of("B2")
        plan = word_move_plan(rd, Word.of([1, 2, 1, 2]), Word.of([2, 1, 2, 1]))
        assert len(plan) == 1 and plan[0].length == 4

    def test_plan_applies_to_target(self):
        rd = RootDatum.of("A3")
        a, b = Word.of([1, 2, 1, 3, 2, 1]), Word.of([3, 2, 3, 1, 2, 3])
        cur = a
        for mv in word_move_plan(rd, a, b):
            cur = apply_move(rd, cur, mv)
        assert cur == b

import json
import random
from fractions import Fraction

import pytest

from qcluster.quiver import (
    FrozenVertex,
    HalfIntegralArrow,
    MultiplierMismatch,
    NonFrozenCollision,
    Quiver,
    TropicalPoint,
    amalgamate,
    frozen_tropical_point,
    quiver_isomorphic,
    tropical_mutate,
)

RNG = random.Random(7)


def a2_quiver():
    return Quiver.from_exchange([[0, 1], [-1, 0]], [1, 1], frozen=[], names=["1", "2"])


def b2_quiver():
    # eps = [[0,1],[-2,0]] with d = (2,1)
    return Quiver.from_exchange([[0, 1], [-2, 0]], [2, 1], frozen=[], names=["1", "2"])


class TestExchangeAndMutation:
    def test_rank2_matrix(self):
        q = a2_quiver()
        assert q.exchange_matrix() == ((Fraction(0), Fraction(1)), (Fraction(-1), Fraction(0)))

    def test_mutation_involutive(self):
        q = b2_quiver()
        q2 = q.mutate("1").mutate("1")
        assert q2.basis == q.basis

    def test_rank2_mutation_flips(self):
        q = a2_quiver()
        m = q.mutate("1").exchange_matrix()
        assert m == ((Fraction(0), Fraction(-1)), (Fraction(1), Fraction(0)))

    def test_b2_mutation_stays_integral(self):
        q = b2_quiver()
        for seq in (["1"], ["2"], ["1", "2"], ["2", "1", "2"]):
            out = q.mutate_sequence(seq)
            out.check()

    def test_three_vertex_mutation_matches_matrix_rule(self):
        # classic FZ check on a random skew-symmetric 3x3 integer matrix
        for _ in range(20):
            e = [[0] * 3 for _ in range(3)]
            for i in range(3):
                for j in range(i + 1, 3):
                    x = RNG.randint(-2, 2)
                    e[i][j], e[j][i] = x, -x
            q = Quiver.from_exchange(e, [1, 1, 1], frozen=[], names=["a", "b", "c"])
            k = RNG.choice(["a", "b", "c"])
            ki = q.index(k)
            got = q.mutate(k).exchange_matrix()
            for i in range(3):
                for j in range(3):
                    b = Fraction(e[i][j])
                    bik, bkj = Fraction(e[i][ki]), Fraction(e[ki][j])
                    if i == ki or j == ki:
                        expect = -b
                    else:
                        expect = b + max(bik, 0) * max(bkj, 0) - max(-bik, 0) * max(-bkj, 0)
                    assert got[i][j] == expect, (e, k, i, j)

    def test_frozen_mutation_raises(self):
        q = Quiver.from_exchange([[0, 1], [-1, 0]], [1, 1], frozen=["2"], names=["1", "2"])
        with pytest.raises(FrozenVertex):
            q.mutate("2")

    def test_frozen_basis_unchanged(self):
        q = Quiver.from_exchange([[0, 1], [-1, 0]], [1, 1], frozen=["2"], names=["1", "2"])
        q2 = q.mutate("1")
        assert q2.basis_vector("2") == q.basis_vector("2")


class TestAmalgamation:
    def tri(self, tag):
        # chain of two frozen vertices with an arrow
        return Quiver.from_exchange([[0, 1], [-1, 0]], [1, 1], frozen=["l", "r"], names=["l", "r"])

    def test_glue_two_chains(self):
        q1, q2 = self.tri(1), self.tri(2)
        glued, prov = amalgamate(
            [q1, q2], {(0, "r"): "m", (1, "l"): "m", (0, "l"): "a", (1, "r"): "b"}
        )
        assert set(glued.names) == {"a", "m", "b"}
        assert prov["m"] == [(0, "r"), (1, "l")]
        # shared vertex eps = sum of parts: a->m from piece 0, m->b from piece 1
        assert glued.eps("a", "m") == 1
        assert glued.eps("m", "b") == 1
        assert glued.multiplier("m") == 1

    def test_multiplier_mismatch(self):
        q1 = Quiver.from_exchange([[0]], [1], frozen=["x"], names=["x"])
        q2 = Quiver.from_exchange([[0]], [2], frozen=["x"], names=["x"])
        with pytest.raises(MultiplierMismatch):
            amalgamate([q1, q2], {(0, "x"): "x", (1, "x"): "x"})

    def test_nonfrozen_collision(self):
        q1 = Quiver.from_exchange([[0]], [1], frozen=[], names=["x"])
        q2 = Quiver.from_exchange([[0]], [1], frozen=["x"], names=["x"])
        with pytest.raises(NonFrozenCollision):
            amalgamate([q1, q2], {(0, "x"): "x", (1, "x"): "x"})

    def test_associative_on_chains(self):
        q = [self.tri(i) for i in range(3)]
        g12, _ = amalgamate(
            [q[0], q[1]], {(0, "l"): "a", (0, "r"): "m1", (1, "l"): "m1", (1, "r"): "b"}
        )
        g123a, _ = amalgamate([g12, q[2]], {(0, "b"): "m2", (1, "l"): "m2", (1, "r"): "c"})
        g123b, _ = amalgamate(
            [q[0], q[1], q[2]],
            {
                (0, "l"): "a",
                (0, "r"): "m1",
                (1, "l"): "m1",
                (1, "r"): "m2",
                (2, "l"): "m2",
                (2, "r"): "c",
            },
        )
        iso = quiver_isomorphic(g123a, g123b)
        assert iso is not None and all(iso[v] == v for v in g123a.names)

    def test_defrost(self):
        q1, q2 = self.tri(1), self.tri(2)
        glued, _ = amalgamate(
            [q1, q2], {(0, "r"): "m", (1, "l"): "m", (0, "l"): "a", (1, "r"): "b"}
        )
        dq = glued.defrost(["m"])
        assert not dq.is_frozen("m")
        assert dq.defrost([]) == dq

    def test_defrost_half_arrow_error(self):
        q = Quiver.from_exchange(
            [[0, Fraction(1, 2)], [Fraction(-1, 2), 0]], [1, 1], frozen=["a", "b"], names=["a", "b"]
        )
        with pytest.raises(HalfIntegralArrow):
            q.defrost(["a"])


class TestIsomorphism:
    def test_reflexive(self):
        q = b2_quiver()
        iso = quiver_isomorphic(q, q)
        assert iso == {"1": "1", "2": "2"}

    def test_no_iso_distinct_weights(self):
        q1 = Quiver.from_exchange([[0, 1], [-1, 0]], [1, 1], frozen=[], names=["1", "2"])
        q2 = Quiver.from_exchange([[0, 2], [-2, 0]], [1, 1], frozen=[], names=["1", "2"])
        assert quiver_isomorphic(q1, q2) is None

    def test_symmetric(self):
        q1 = Quiver.from_exchange([[0, 1], [-1, 0]], [1, 1], frozen=[], names=["a", "b"])
        q2 = Quiver.from_exchange([[0, -1], [1, 0]], [1, 1], frozen=[], names=["x", "y"])
        iso = quiver_isomorphic(q1, q2)
        assert iso == {"a": "y", "b": "x"}
        back = quiver_isomorphic(q2, q1)
        assert back == {v: k for k, v in iso.items()}

    def test_mutation_transport(self):
        q = a2_quiver()
        iso = {"1": "2", "2": "1"}
        q_relab = q.relabel(iso)
        left = q.mutate("1")
        right = q_relab.mutate("2")
        found = quiver_isomorphic(left, right)
        assert found is not None and found["1"] == "2"


class TestTropical:
    def test_sign_flip(self):
        q = a2_quiver()
        p = TropicalPoint.of({"1": 1})
        assert tropical_mutate(p, q, "1") == TropicalPoint.of({"1": -1})

    def test_double_mutation_identity(self):
        q = b2_quiver()
        for _ in range(10):
            p = TropicalPoint.of({"1": RNG.randint(-3, 3), "2": RNG.randint(-3, 3)})
            p2 = tropical_mutate(tropical_mutate(p, q, "1"), q.mutate("1"), "1")
            assert p2 == p

    def test_frozen_point(self):
        q = Quiver.from_exchange(
            [[0, 1, 0], [-1, 0, 1], [0, -1, 0]], [1, 1, 1], frozen=["f"], names=["a", "b", "f"]
        )
        assert frozen_tropical_point(q, "f") == TropicalPoint.of({"b": 1})


class TestJson:
    def test_roundtrip_bit_exact(self):
        q = b2_quiver().mutate("1").mutate("2")
        s = json.dumps(q.to_json(), sort_keys=True)
        q2 = Quiver.from_json(json.loads(s))
        assert q2 == q
        assert json.dumps(q2.to_json(), sort_keys=True) == s

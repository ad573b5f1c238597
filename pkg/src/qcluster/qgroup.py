"""Quantum group generators as quantum torus elements, and their relations.

The Borel patterns W, K live on level lanes of braid-word quivers; the full
generator set lives on the two-point disc, in the quotient by the central
outer monodromy.  PBW elements are computed in the X-torus of a w_0-word
chart by the q-commutator recursion seeded at the simple chain positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from qcluster.cartan import RootDatum, Word, beta_level, beta_sequence, is_reduced, length, star
from qcluster.linalg import Vec, add, unit, vec
from qcluster.qtorus import (
    QS_ONE,
    CentralQuotient,
    QScalar,
    TorusAlgebra,
    TorusElement,
    q_binomial,
)
from qcluster.quiver import Quiver
from qcluster.sequences import DiscQuiver, disc_quiver, e_name, lane_cycle, slot_name
from qcluster.wordquiver import WordQuiver, chain_name, h_name, word_quiver

__all__ = [
    "x_algebra",
    "w_patterns",
    "verify_uq_borel",
    "GeneratorSet",
    "disc_realization",
    "geometric_coproduct_check",
    "PBWData",
    "pbw_elements",
    "lusztig_compare",
    "RecursionStuck",
]


class RecursionStuck(RuntimeError):
    pass


def x_algebra(q: Quiver, D: int | None = None, name: str = "") -> TorusAlgebra:
    """Quantum torus on the quiver's initial basis with form <e_v, e_w>."""
    n = len(q.names)
    gram = tuple(tuple(q.pairing(q.basis[i], q.basis[j]) for j in range(n)) for i in range(n))
    if D is None:
        D = 2
        for x in q.d:
            D = D * x // _gcd(D, x)
        D *= 2
    return TorusAlgebra(n, gram, D, name)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def chain_w_pattern(alg: TorusAlgebra, q: Quiver, chain: Sequence[str]) -> tuple[TorusElement, TorusElement]:
    """(W, K) of a type-A chain: W = sum of proper partial sums, K = full sum."""
    n = len(q.names)
    total = [Fraction(0)] * n
    w = alg.zero()
    for t, v in enumerate(chain):
        total[q.index(v)] += 1
        if t < len(chain) - 1:
            w = w + alg.monomial(tuple(total))
    return w, alg.monomial(tuple(total))


def w_patterns(rd: RootDatum, word: Word) -> tuple[TorusAlgebra, dict[int, TorusElement], dict[int, TorusElement]]:
    """Borel patterns on the braid-word quiver J(i1) * ... * J(im).

    Returns the X-torus algebra and per-level elements W_a, K_a built from
    the level-lane partial sums.
    """
    from qcluster.wordquiver import braid_quiver

    wq = braid_quiver(rd, word)
    q = wq.quiver
    alg = x_algebra(q, name=f"J({','.join(map(str, word.letters))})")
    ws: dict[int, TorusElement] = {}
    ks: dict[int, TorusElement] = {}
    for i in rd.index_set:
        chain = wq.chain(i)
        w, k = chain_w_pattern(alg, q, chain)
        ws[i] = w
        ks[i] = k
    return alg, ws, ks


def _proportionality(a: TorusElement, b: TorusElement) -> Fraction | None:
    """lambda with a = q^lambda b, or None."""
    if set(a.terms) != set(b.terms):
        return None
    lam = None
    for v, c in a.terms.items():
        d = b.terms[v]
        exps_c = sorted(c.terms)
        exps_d = sorted(d.terms)
        if len(exps_c) != len(exps_d):
            return None
        shift = exps_c[0] - exps_d[0]
        if d.shift(shift) != c:
            return None
        if lam is None:
            lam = shift
        elif lam != shift:
            return None
    return lam


def serre_relation(e1: TorusElement, e2: TorusElement, c: int, d_alpha: int) -> TorusElement:
    """sum_s (-1)^s [1-c choose s]_{q_alpha} e1^s e2 e1^{1-c-s}."""
    n = 1 - c
    out = e1.algebra.zero()
    for s in range(n + 1):
        coeff = q_binomial(n, s, d=d_alpha)
        if s % 2:
            coeff = -coeff
        out = out + (e1**s * e2 * e1 ** (n - s)).scale(coeff)
    return out


def verify_uq_borel(rd: RootDatum, word: Word) -> list[tuple[str, bool, str]]:
    """Check the Borel relations for the W/K patterns of a braid word."""
    alg, ws, ks = w_patterns(rd, word)
    report: list[tuple[str, bool, str]] = []
    for a in rd.index_set:
        d_a = rd.d[a - 1]
        for b in rd.index_set:
            kk = ks[a] * ks[b] - ks[b] * ks[a]
            report.append((f"[K_{a}, K_{b}] = 0", kk.is_zero(), ""))
            lam = _proportionality(ks[a] * ws[b], ws[b] * ks[a])
            want = Fraction(2, d_a) if a == b else Fraction(rd.cartan[a - 1][b - 1], d_a)
            report.append(
                (
                    f"K_{a} W_{b} = q_{a}^{{{'2' if a == b else 'C'}}} W_{b} K_{a}",
                    lam == want,
                    f"lambda={lam} want={want}",
                )
            )
            if a != b:
                c = rd.cartan[a - 1][b - 1]
                rel = serre_relation(ws[a], ws[b], c, d_a)
                report.append((f"Serre({a},{b}) with {1 - c + 1} terms", rel.is_zero(), ""))
    return report


# ---------------------------------------------------------------------------
# the two-point disc realization


@dataclass
class GeneratorSet:
    """E_i, F_i, K_i as torus elements, with the central quotient."""

    rd: RootDatum
    disc: DiscQuiver
    alg: TorusAlgebra
    E: dict[int, TorusElement]
    F: dict[int, TorusElement]
    K: dict[int, TorusElement]
    Kinv: dict[int, TorusElement]
    centrals: list[Vec]
    _pivots: list[tuple[int, Vec]]

    def reduce(self, el: TorusElement) -> TorusElement:
        out = {}
        for v, c in el.terms.items():
            w = list(v)
            for piv, z in self._pivots:
                k = Fraction(w[piv]) / z[piv]
                w = [a - k * b for a, b in zip(w, z)]
            w = tuple(w)
            out[w] = out.get(w, QScalar()) + c
        return TorusElement(self.alg, out)

    def equal(self, a: TorusElement, b: TorusElement) -> bool:
        return self.reduce(a - b).is_zero()


def _lane_paths(dq: DiscQuiver, i: int) -> tuple[list[str], list[str]]:
    """Lane paths at level i avoiding the seam slots of s_1 and s_2."""
    cyc = lane_cycle(dq, i)

    def path_after(slot: str) -> list[str]:
        k = cyc.index(slot)
        return [cyc[(k + t) % len(cyc)] for t in range(1, len(cyc))]

    return path_after(dq.seam(1, i)), path_after(dq.seam(2, i))


def disc_realization(rd: RootDatum, word: Word | None = None) -> GeneratorSet:
    """Generators on the two-point disc, in the outer-monodromy quotient."""
    from qcluster.cartan import longest_word

    w = word if word is not None else longest_word(rd)
    dq = disc_quiver(rd, w, 2)
    q = dq.quiver
    alg = x_algebra(q, name="disc")

    E: dict[int, TorusElement] = {}
    F: dict[int, TorusElement] = {}
    K: dict[int, TorusElement] = {}
    k2: dict[int, TorusElement] = {}
    for i in rd.index_set:
        p1, _ = _lane_paths(dq, i)
        e_el, k_el = chain_w_pattern(alg, q, list(reversed(p1)))
        E[i] = e_el
        K[i] = k_el
    for i in rd.index_set:
        ist = star(rd, i)
        _, p2 = _lane_paths(dq, ist)
        f_el, k2_el = chain_w_pattern(alg, q, list(reversed(p2)))
        F[i] = f_el
        k2[i] = k2_el

    centrals: list[Vec] = []
    for i in rd.index_set:
        z = add(K[i].monomial_vector(), k2[i].monomial_vector())
        centrals.append(z)
    # triangular pivot data for reduction modulo the central vectors
    pivots: list[tuple[int, Vec]] = []
    zs = [list(z) for z in centrals]
    used: set[int] = set()
    for z in zs:
        piv = next(
            (t for t, x in enumerate(z) if x != 0 and t not in used),
            None,
        )
        assert piv is not None, "central vectors are not independent"
        for other in zs:
            if other is not z and other[piv] != 0:
                f = Fraction(other[piv]) / z[piv]
                for t in range(len(other)):
                    other[t] -= f * z[t]
        used.add(piv)
        pivots.append((piv, tuple(z)))
    # K^{-1} in the quotient: K_i^{-1} = X_{-k} ~ X_{z - k} = k2-vector
    kinv = {i: alg.monomial(tuple(-x for x in K[i].monomial_vector())) for i in rd.index_set}
    gens = GeneratorSet(rd, dq, alg, E, F, K, kinv, centrals, pivots)
    # centrality sanity: z pairs to zero with every unit
    for z in centrals:
        for t in range(alg.rank):
            assert alg.pairing(vec(z), unit(alg.rank, t)) == 0, "outer monodromy is not central"
    return gens


def verify_uqg(gens: GeneratorSet) -> list[tuple[str, bool, str]]:
    """Full relation check (Re1)-(Re2) in the quotient algebra."""
    rd = gens.rd
    report: list[tuple[str, bool, str]] = []
    q_of = lambda i: Fraction(1, rd.d[i - 1])
    for i in rd.index_set:
        for j in rd.index_set:
            lhs = gens.E[i] * gens.F[j] - gens.F[j] * gens.E[i]
            if i == j:
                qi = QScalar.q_power(q_of(i)) - QScalar.q_power(-q_of(i))
                rhs = (gens.Kinv[i] - gens.K[i]).scale(qi)
            else:
                rhs = gens.alg.zero()
            report.append((f"[E_{i}, F_{j}] relation", gens.equal(lhs, rhs), ""))
            # K E = q^{C} E K and K F = q^{-C} F K, measured exactly
            lam = _proportionality(gens.reduce(gens.K[i] * gens.E[j]), gens.reduce(gens.E[j] * gens.K[i]))
            want = Fraction(rd.cartan[i - 1][j - 1], rd.d[i - 1])
            report.append((f"K_{i} E_{j} commutation", lam == want, f"lambda={lam} want={want}"))
            lam = _proportionality(gens.reduce(gens.K[i] * gens.F[j]), gens.reduce(gens.F[j] * gens.K[i]))
            report.append((f"K_{i} F_{j} commutation", lam == -want, f"lambda={lam} want={-want}"))
            kk = gens.K[i] * gens.K[j] - gens.K[j] * gens.K[i]
            report.append((f"[K_{i}, K_{j}] = 0", kk.is_zero(), ""))
            if i != j:
                c = rd.cartan[i - 1][j - 1]
                rel = serre_relation(gens.E[i], gens.E[j], c, rd.d[i - 1])
                report.append((f"E-Serre({i},{j})", gens.reduce(rel).is_zero(), ""))
                rel = serre_relation(gens.F[i], gens.F[j], c, rd.d[i - 1])
                report.append((f"F-Serre({i},{j})", gens.reduce(rel).is_zero(), ""))
    # central elements commute with everything
    for z in gens.centrals:
        zel = gens.alg.monomial(z)
        for i in rd.index_set:
            for g in (gens.E[i], gens.F[i], gens.K[i]):
                report.append(("outer monodromy central", (zel * g - g * zel).is_zero(), ""))
    return report


def sl2_casimir(gens: GeneratorSet) -> TorusElement:
    """(EF + FE - (q + q^-1)(K + K^-1)) / 2 for the rank-1 generators."""
    assert gens.rd.rank == 1
    e, f, k, kinv = gens.E[1], gens.F[1], gens.K[1], gens.Kinv[1]
    q_plus = QScalar.q_power(1) + QScalar.q_power(-1)
    raw = e * f + f * e - (k + kinv).scale(q_plus)
    return gens.reduce(raw).scale(QScalar({Fraction(0): Fraction(1, 2)}))


# ---------------------------------------------------------------------------
# geometric coproduct


def geometric_coproduct_check(rd: RootDatum, word: Word) -> list[tuple[str, bool, str]]:
    """Coproduct via gluing: the concatenated-lane patterns against the Hopf
    formulas in the tensor-square torus."""
    wq = word_quiver(rd, word, view="J")
    q = wq.quiver
    n = len(q.names)
    gram1 = tuple(tuple(q.pairing(q.basis[i], q.basis[j]) for j in range(n)) for i in range(n))
    gram = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            gram[i][j] = gram1[i][j]
            gram[n + i][n + j] = gram1[i][j]
    alg2 = TorusAlgebra(2 * n, tuple(tuple(r) for r in gram), 2, "tensor")

    def left(el_vec: Vec) -> Vec:
        return tuple(list(el_vec) + [Fraction(0)] * n)

    def right(el_vec: Vec) -> Vec:
        return tuple([Fraction(0)] * n + list(el_vec))

    report: list[tuple[str, bool, str]] = []
    for i in rd.index_set:
        chain = [q.index(v) for v in wq.chain(i)]
        # W, K of the single factor as vectors over the chart
        def par_sums(side: Callable[[Vec], Vec]) -> tuple[list[Vec], Vec]:
            total = [Fraction(0)] * n
            outs = []
            for t, vi in enumerate(chain):
                total[vi] += 1
                if t < len(chain) - 1:
                    outs.append(side(tuple(total)))
            return outs, side(tuple(total))

        lsums, lk = par_sums(left)
        rsums, rk = par_sums(right)
        w_l = sum((alg2.monomial(v) for v in lsums), alg2.zero())
        w_r = sum((alg2.monomial(v) for v in rsums), alg2.zero())
        k_l, k_r = alg2.monomial(lk), alg2.monomial(rk)
        # partial sums of the concatenated (glued) chain; the chains share the
        # glued endpoint, so the crossing partial sum equals the full left sum
        # and is dropped from the W pattern of the amalgam
        total = [Fraction(0)] * (2 * n)
        w_cat = alg2.zero()
        full_chain = [("L", vi) for vi in chain] + [("R", vi) for vi in chain]
        for t, (side_tag, vi) in enumerate(full_chain):
            total[vi if side_tag == "L" else n + vi] += 1
            if t < len(full_chain) - 1 and t != len(chain) - 1:
                w_cat = w_cat + alg2.monomial(tuple(total))
        k_cat = alg2.monomial(tuple(total))
        report.append((f"coproduct K_{i} = K (x) K", k_cat == k_l * k_r, ""))
        want = w_l + k_l * w_r
        report.append((f"coproduct E_{i} = E (x) 1 + K (x) E", w_cat == want, ""))
    return report


# ---------------------------------------------------------------------------
# PBW elements


@dataclass
class PBWData:
    rd: RootDatum
    word: Word
    alg: TorusAlgebra
    quiver: Quiver
    elements: list[TorusElement]
    seeds: dict[int, TorusElement]


def _prefix_root(rd: RootDatum, letters: Sequence[int], c: int) -> Vec:
    v = rd.simple_root(c)
    for a in reversed(list(letters)):
        v = rd.reflect_root(a, v)
    return v


def _wmat(rd: RootDatum, letters: Sequence[int]) -> tuple[Vec, ...]:
    cols = []
    for k in rd.index_set:
        v = rd.simple_coroot(k)
        for a in reversed(list(letters)):
            v = rd.reflect_coroot(a, v)
        cols.append(v)
    return tuple(cols)


def pbw_elements(rd: RootDatum, word: Word) -> PBWData:
    """PBW elements A_{i,k} in the X-torus of the word chart (simply laced).

    Seeds: kappa(E_j) is the unit monomial at the H vertex with chain coroot
    alpha_{j*}; the recursion descends through commuting swaps and the
    q-commutator of the braid move.
    """
    if any(d != 1 for d in rd.d):
        raise ValueError("PBW realization implemented for simply-laced types")
    if not (word.is_unbarred() and is_reduced(rd, word)):
        raise ValueError("need an unbarred reduced word of w_0")
    wq = word_quiver(rd, word, view="Jbar")
    keep = [v for v in wq.quiver.names if v not in wq.quiver.frozen or "inf" in v]
    pquiver = wq.quiver.restrict(keep)
    alg = x_algebra(pquiver, name="pbw")

    seeds: dict[int, TorusElement] = {}
    for j in rd.index_set:
        h = h_name(star(rd, j), barred=False)
        seeds[j] = alg.unit(pquiver.index(h))

    q_minus = QScalar.q_power(1) - QScalar.q_power(-1)
    memo: dict[tuple, TorusElement] = {}

    def pbw(prefix: tuple[int, ...], c: int) -> TorusElement:
        key = (_wmat(rd, prefix), c)
        if key in memo:
            return memo[key]
        gamma = _prefix_root(rd, prefix, c)
        lvl = beta_level(rd, gamma)  # same coordinates for roots and coroots
        if lvl is not None:
            out = seeds[lvl]
            memo[key] = out
            return out
        if not prefix:
            raise RecursionStuck("empty prefix with non-simple root")
        # pick a descent letter of the prefix element
        candidates = []
        for a in set(abs(x) for x in prefix):
            if length(rd, list(prefix) + [a]) == len(prefix) - 1:
                candidates.append(a)
        if not candidates:
            raise RecursionStuck(f"no descent for prefix {prefix}")
        # prefer commuting descents, then valid q-commutator branches
        def shorter(pfx: tuple[int, ...], a: int) -> tuple[int, ...]:
            # a reduced word for (prefix element) s_a
            target = _wmat(rd, list(pfx) + [a])
            out = _reduced_word_of(rd, target, len(pfx) - 1)
            return out

        for a in sorted(candidates):
            if rd.cartan[a - 1][c - 1] == 0:
                out = pbw(shorter(prefix, a), c)
                memo[key] = out
                return out
        for a in sorted(candidates):
            if rd.cartan[a - 1][c - 1] != -1:
                continue
            w2 = shorter(prefix, a)
            if length(rd, list(w2) + [c]) != len(w2) + 1:
                continue
            # A_{i,k} = (q^{1/2} A_{k-1} A_{k+1} - q^{-1/2} A_{k+1} A_{k-1}) / (q - q^{-1})
            # with A_{k-1} = pbw(w2, a) and A_{k+1} = pbw(w2, c)
            pa = pbw(w2, a)
            pc = pbw(w2, c)
            num = (pa * pc).scale(QScalar.q_power(Fraction(1, 2))) - (pc * pa).scale(
                QScalar.q_power(Fraction(-1, 2))
            )
            out = num.divide_scalar(q_minus)
            memo[key] = out
            return out
        raise RecursionStuck(f"no usable descent for prefix {prefix} letter {c}")

    elements = []
    for k in range(1, len(word) + 1):
        elements.append(pbw(word.letters[: k - 1], word.letters[k - 1]))
    return PBWData(rd, word, alg, pquiver, elements, seeds)


def _reduced_word_of(rd: RootDatum, target: tuple[Vec, ...], target_len: int) -> tuple[int, ...]:
    """A reduced word (greedy least descent) for the element with matrix `target`."""
    if target_len == 0:
        return ()
    letters: list[int] = []
    mat_now = target
    remaining = target_len
    while remaining > 0:
        for i in rd.index_set:
            img = mat_now[i - 1]  # w(alpha_i^vee)
            if all(x <= 0 for x in img):
                letters.append(i)
                refl = _wmat(rd, [i])
                mat_now = tuple(
                    tuple(
                        sum((refl[s][t] * mat_now[t][r] for t in range(rd.rank)), Fraction(0))
                        for r in range(rd.rank)
                    )
                    for s in range(rd.rank)
                )
                remaining -= 1
                break
        else:
            raise RecursionStuck("failed to peel a descent")
    return tuple(reversed(letters))


def pbw_z_shadow_check(rd: RootDatum, word: Word) -> bool:
    """Classical shadow of the braid recursion: for a braid move at positions
    (k-1, k, k+1), the two middle elements satisfy a + a' = (first)(last) at
    q = 1 (the z-coordinate relation ac - b)."""
    data = pbw_elements(rd, word)
    letters = word.letters
    ok = True
    for k in range(1, len(letters) - 1):
        a, b, c = letters[k - 1], letters[k], letters[k + 1]
        if a == c and rd.cartan[a - 1][b - 1] == -1:
            moved = letters[: k - 1] + (b, a, b) + letters[k + 2 :]
            data2 = pbw_elements(rd, Word.of(moved))
            lhs = data.elements[k].q1_terms()
            lhs2 = data2.elements[k].q1_terms()
            prod = (data.elements[k - 1] * data.elements[k + 1]).q1_terms()
            total: dict = dict(lhs)
            for v, cc in lhs2.items():
                total[v] = total.get(v, Fraction(0)) + cc
            ok = ok and total == prod
    return ok


# ---------------------------------------------------------------------------
# Lusztig comparison (rank 1 geometric; K-table cross-check)


def lusztig_compare_sl2() -> list[tuple[str, bool, str]]:
    """T_i-table against the geometric braid generator on the two-point disc."""
    rd = RootDatum.of("A1")
    gens = disc_realization(rd)
    dq = gens.disc
    alg = gens.alg
    q = dq.quiver
    # beta: J_1 <-> J_2, H_1 -> -(H_1 + J_1), H_2 -> -(J_2 + H_2)
    j1, j2 = dq.seam(1, 1), dq.seam(2, 1)
    h1, h2 = e_name(1), e_name(2)
    n = alg.rank
    idx = {v: q.index(v) for v in q.names}

    def lattice_map(v: Vec) -> Vec:
        out = [Fraction(0)] * n
        images = {
            idx[h1]: {idx[h1]: -1, idx[j1]: -1},
            idx[j2]: {idx[j1]: 1},
            idx[h2]: {idx[j2]: -1, idx[h2]: -1},
            idx[j1]: {idx[j2]: 1},
        }
        for t, x in enumerate(v):
            for s, cgain in images[t].items():
                out[s] += x * cgain
        return tuple(out)

    # check the map preserves the form (so it extends to the algebra)
    report: list[tuple[str, bool, str]] = []
    ok = True
    for a in range(n):
        for b in range(n):
            u1, u2 = unit(n, a), unit(n, b)
            if alg.pairing(vec(lattice_map(u1)), vec(lattice_map(u2))) != alg.pairing(u1, u2):
                ok = False
    report.append(("braid lattice map preserves the form", ok, ""))

    def apply(el: TorusElement) -> TorusElement:
        return TorusElement(alg, {lattice_map(v): c for v, c in el.terms.items()})

    e, f, k, kinv = gens.E[1], gens.F[1], gens.K[1], gens.Kinv[1]
    # T(E) = q^{-1} K^{-1} F,  T(F) = q E K,  T(K) = K^{-1}
    te = apply(e)
    want = (kinv * f).scale(QScalar.q_power(-1))
    report.append(("T(E) = q^-1 K^-1 F", gens.equal(te, want), ""))
    tf = apply(f)
    want = (e * k).scale(QScalar.q_power(1))
    report.append(("T(F) = q E K", gens.equal(tf, want), ""))
    tk = apply(k)
    report.append(("T(K) = K^-1", gens.equal(tk, kinv), ""))
    return report


def lusztig_k_table(rd: RootDatum, word: Word) -> bool:
    """The braid-shift action on Cartan coordinates matches Lusztig's K-table:
    T_i(K_j) = K_j K_i^{-C_ji} (so K_i K_j when C_ji = -1)."""
    from qcluster.sequences import braid_shift_sequence, kp_names

    i = word.letters[0]
    shift = braid_shift_sequence(rd, word, 2, i)
    names = kp_names(rd, word, 2)
    idx = {n: t for t, n in enumerate(names)}
    for j in rd.index_set:
        row = shift.matrix[idx[f"K1:{j}"]]
        want = {idx[f"K1:{j}"]: Fraction(1)}
        want[idx[f"K1:{i}"]] = want.get(idx[f"K1:{i}"], Fraction(0)) + Fraction(
            -rd.cartan[j - 1][i - 1]
        )
        got = {t: x for t, x in enumerate(row) if x}
        if got != {t: x for t, x in want.items() if x}:
            return False
    return True

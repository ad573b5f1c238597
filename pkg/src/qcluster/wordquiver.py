"""Word quivers: elementary pieces, their amalgamation, and braid moves.

A reduced word i = (i_1, ..., i_m) of (u, v) in W x W gives elementary
quivers, one per letter, an all-frozen quiver K(i) on the positions, and
their amalgamation Q(i).  Level-chain vertices are named "{i choose k}";
positions whose chain coroot is simple carry extra vertices named
"{i choose -inf}" (unbarred) or "{i choose +inf}" (barred).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from qcluster.cartan import (
    NotReduced,
    RootDatum,
    Word,
    beta_level,
    beta_sequence,
    chain_roots,
    is_reduced,
    star,
)
from qcluster.linalg import Vec, bilinear, inverse, mat, matvec, unit
from qcluster.quiver import Quiver, amalgamate, quiver_isomorphic

__all__ = [
    "WordQuiver",
    "MoveNotApplicable",
    "SingularTransition",
    "elementary_quiver",
    "k_quiver",
    "h_quiver",
    "word_quiver",
    "braid_move_script",
    "primary_lattice_vectors",
    "chain_name",
    "h_name",
]


class MoveNotApplicable(ValueError):
    pass


class SingularTransition(ValueError):
    pass


def chain_name(i: int, k: int) -> str:
    return f"{{{i} choose {k}}}"


def h_name(i: int, barred: bool) -> str:
    return f"{{{i} choose {'+inf' if barred else '-inf'}}}"


def _complete_d_skew(names, entries, d) -> list[list[Fraction]]:
    """Fill an exchange matrix from its given entries using eps_ji = -eps_ij d_i/d_j."""
    n = len(names)
    idx = {v: i for i, v in enumerate(names)}
    eps = [[Fraction(0)] * n for _ in range(n)]
    for (a, b), x in entries.items():
        ia, ib = idx[a], idx[b]
        eps[ia][ib] = Fraction(x)
        eps[ib][ia] = -Fraction(x) * d[ia] / d[ib]
    return eps


def elementary_quiver(rd: RootDatum, letter: int, with_extra: bool = True) -> Quiver:
    """J(i) / J-bar(i) for letter i > 0, and their barred versions for i < 0.

    Vertices: passive levels "j" for j != |letter|, doubled pair "l", "r",
    and "e" when with_extra.  All vertices frozen (pieces get defrosted after
    amalgamation).  eps(l, j) = -C_ij/2, eps(r, j) = C_ij/2,
    eps(r, l) = eps(l, e) = eps(e, r) = 1; barred letters negate eps.
    """
    i = abs(letter)
    passive = [j for j in rd.index_set if j != i]
    names = [str(j) for j in passive] + ["l", "r"] + (["e"] if with_extra else [])
    d = [rd.d[j - 1] for j in passive] + [rd.d[i - 1]] * (3 if with_extra else 2)
    levels: list[int | None] = list(passive) + [i, i] + ([None] if with_extra else [])
    entries: dict[tuple[str, str], Fraction] = {}
    for j in passive:
        c = Fraction(rd.cartan[i - 1][j - 1])
        entries[("l", str(j))] = -c / 2
        entries[("r", str(j))] = c / 2
    entries[("r", "l")] = Fraction(1)
    if with_extra:
        entries[("l", "e")] = Fraction(1)
        entries[("e", "r")] = Fraction(1)
    if letter < 0:
        entries = {k: -v for k, v in entries.items()}
    eps = _complete_d_skew(names, entries, d)
    return Quiver.from_exchange(eps, d, frozen=names, names=names, levels=levels)


def k_quiver(rd: RootDatum, w: Word) -> Quiver:
    """All-frozen quiver on the positions of a reduced word.

    eps_jk = sgn(k-j)/2 (chain root_j, beta_k) when both letters are
    unbarred, sgn(j-k)/2 (...) when both barred, 0 otherwise.
    """
    if not is_reduced(rd, w):
        raise NotReduced(str(w.letters))
    m = len(w)
    betas = beta_sequence(rd, w)
    roots = chain_roots(rd, w)
    names = [f"K{p+1}" for p in range(m)]
    d = [rd.d[abs(w.letters[p]) - 1] for p in range(m)]
    eps = [[Fraction(0)] * m for _ in range(m)]
    for j in range(m):
        for k in range(m):
            if j == k:
                continue
            lj, lk = w.letters[j], w.letters[k]
            if (lj > 0) != (lk > 0):
                continue
            sgn = 1 if ((k > j) == (lj > 0)) else -1
            eps[j][k] = Fraction(sgn) * rd.pair_root_coroot(roots[j], betas[k]) / 2
    return Quiver.from_exchange(eps, d, frozen=names, names=names, levels=[None] * m)


def h_quiver(rd: RootDatum, w: Word) -> Quiver:
    """Full subquiver of K(i) on the positions with simple chain coroot."""
    kq = k_quiver(rd, w)
    betas = beta_sequence(rd, w)
    keep = [f"K{p+1}" for p in range(len(w)) if beta_level(rd, betas[p]) is not None]
    return kq.restrict(keep)


@dataclass(frozen=True)
class WordQuiver:
    """A word quiver view with level-lane naming.

    quiver:   the amalgamated quiver (view-dependent vertex set)
    word:     the reduced word
    view:     "Q" (everything), "Jbar" (simple K-vertices only),
              "J" (no extra vertices), "uf" (unfrozen part)
    position: name of the chain slot "{i choose k}" -> 1-based word position
              of the k-th occurrence of level i (1 <= k <= n^i)
    h_positions: H-vertex name -> 1-based word position
    """

    rd: RootDatum
    quiver: Quiver
    word: Word
    view: str
    position: tuple[tuple[str, int], ...]
    h_positions: tuple[tuple[str, int], ...]

    def n_occ(self, level: int) -> int:
        return self.word.occurrences(level)

    def chain(self, level: int) -> list[str]:
        return [chain_name(level, k) for k in range(self.n_occ(level) + 1)]

    def name_of_position(self, p: int) -> str:
        lvl = abs(self.word.letters[p - 1])
        k = sum(1 for x in self.word.letters[:p] if abs(x) == lvl)
        return chain_name(lvl, k)

    def to_json(self) -> dict:
        data = self.quiver.to_json()
        data["word"] = self.word.to_json()
        data["view"] = self.view
        data["names"] = {name: pos for name, pos in self.position}
        data["h_names"] = {name: pos for name, pos in self.h_positions}
        return data


def braid_quiver(rd: RootDatum, w: Word) -> WordQuiver:
    """Amalgamation J(i_1) * ... * J(i_m) for an arbitrary braid word.

    No extra vertices and no K-part, so the word need not be reduced; level
    chains carry the same "{i choose k}" names with frozen endpoints.
    """
    m = len(w)
    pieces = [elementary_quiver(rd, w.letters[p], with_extra=False) for p in range(m)]
    occ: dict[int, list[int]] = {j: [] for j in rd.index_set}
    for p, letter in enumerate(w.letters):
        occ[abs(letter)].append(p + 1)
    gluing: dict[tuple[int, str], str] = {}
    levels: dict[str, int | None] = {}
    for j in rd.index_set:
        ps = occ[j]
        for t in range(len(ps) + 1):
            name = chain_name(j, t)
            levels[name] = j
            lo = ps[t - 1] if t >= 1 else 0
            hi = ps[t] if t < len(ps) else m + 1
            if t >= 1:
                gluing[(lo - 1, "r")] = name
            for p in range(lo + 1, hi):
                if abs(w.letters[p - 1]) != j:
                    gluing[(p - 1, str(j))] = name
            if t < len(ps):
                gluing[(hi - 1, "l")] = name
    glued, _prov = amalgamate(pieces, gluing, levels=levels)
    interior = [chain_name(j, t) for j in rd.index_set for t in range(1, len(occ[j]))]
    glued = glued.defrost(interior)
    position = tuple(
        (chain_name(j, t + 1), p) for j in rd.index_set for t, p in enumerate(occ[j])
    )
    return WordQuiver(rd, glued, w, "braid", position, ())


def word_quiver(rd: RootDatum, w: Word, view: str = "Jbar") -> WordQuiver:
    """Amalgamation Q(i) = Jbar(i_1) * ... * Jbar(i_m) * K(i), with views."""
    if not is_reduced(rd, w):
        raise NotReduced(str(w.letters))
    m = len(w)
    pieces = [elementary_quiver(rd, w.letters[p], with_extra=True) for p in range(m)]
    pieces.append(k_quiver(rd, w))
    betas = beta_sequence(rd, w)

    occ: dict[int, list[int]] = {j: [] for j in rd.index_set}
    for p, letter in enumerate(w.letters):
        occ[abs(letter)].append(p + 1)

    gluing: dict[tuple[int, str], str] = {}
    levels: dict[str, int | None] = {}
    for j in rd.index_set:
        ps = occ[j]
        # slot t in 0..n_j collects: r-side of occurrence t, passive slots of
        # the positions strictly between occurrence t and t+1, l-side of t+1
        for t in range(len(ps) + 1):
            name = chain_name(j, t)
            levels[name] = j
            lo = ps[t - 1] if t >= 1 else 0
            hi = ps[t] if t < len(ps) else m + 1
            if t >= 1:
                gluing[(lo - 1, "r")] = name
            for p in range(lo + 1, hi):
                if abs(w.letters[p - 1]) != j:
                    gluing[(p - 1, str(j))] = name
            if t < len(ps):
                gluing[(hi - 1, "l")] = name
    # extra vertices glue onto the K-quiver positions
    k_names: dict[int, str] = {}
    for p in range(1, m + 1):
        lvl = beta_level(rd, betas[p - 1])
        if lvl is not None:
            name = h_name(lvl, barred=w.letters[p - 1] < 0)
        else:
            name = f"K:{p}"
        k_names[p] = name
        gluing[(p - 1, "e")] = name
        gluing[(m, f"K{p}")] = name
        levels[name] = None

    glued, _prov = amalgamate(pieces, gluing, levels=levels)
    # interior chain slots become unfrozen
    interior = [
        chain_name(j, t) for j in rd.index_set for t in range(1, len(occ[j]))
    ]
    glued = glued.defrost(interior)

    if view in ("Jbar", "J", "uf"):
        keep = set(glued.names)
        for p in range(1, m + 1):
            if beta_level(rd, betas[p - 1]) is None:
                keep.discard(k_names[p])
        if view in ("J", "uf"):
            keep = {v for v in keep if not v.startswith("{") or "inf" not in v}
        if view == "uf":
            keep = {v for v in keep if v not in glued.frozen}
        glued = glued.restrict(sorted(keep))
    elif view != "Q":
        raise ValueError(f"unknown view {view!r}")

    position = tuple(
        (chain_name(j, t + 1), p) for j in rd.index_set for t, p in enumerate(occ[j])
    )
    h_positions = tuple(
        (k_names[p], p)
        for p in range(1, m + 1)
        if beta_level(rd, betas[p - 1]) is not None and k_names[p] in glued.names
    )
    return WordQuiver(rd, glued, w, view, position, h_positions)


# ---------------------------------------------------------------------------
# braid moves


def _occ_before(w: Word, level: int, p: int) -> int:
    """Occurrences of `level` among the first p letters."""
    return sum(1 for x in w.letters[:p] if abs(x) == level)


def braid_move_script(
    wq: WordQuiver, position: int
) -> tuple[WordQuiver, list[str], dict[str, str]]:
    """Apply the local braid move starting at 1-based `position`.

    Returns (moved word quiver, mutation script as vertex names, level
    isomorphism mutated-quiver -> target quiver).  Case is detected from the
    letters: (i, ibar) swap, or braid segments with m_ij in {3, 4, 6}.
    """
    rd, w = wq.rd, wq.word
    p = position
    ls = w.letters
    if p < 1 or p > len(ls) - 1:
        raise MoveNotApplicable("position out of range")
    a, b = ls[p - 1], ls[p]
    script: list[str]
    relevel: tuple[str, int] | None = None
    if a == -b:
        # case 1: one mutation at the level-|a| slot between the two letters
        i = abs(a)
        t = _occ_before(w, i, p)
        script = [chain_name(i, t)]
        new_letters = ls[: p - 1] + (b, a) + ls[p + 1 :]
    elif (a > 0) == (b > 0) and abs(a) != abs(b):
        i, j = abs(a), abs(b)
        mij = rd.braid_order(i, j)
        seg = ls[p - 1 : p - 1 + mij]
        want = tuple((1 if a > 0 else -1) * (i if t % 2 == 0 else j) for t in range(mij))
        if seg != want:
            raise MoveNotApplicable(f"letters at {p} do not form an (i,j) braid segment")
        ti = _occ_before(w, i, p)
        tj = _occ_before(w, j, p + 1)
        if mij == 3:
            # "re-placing it at level j": the mutated vertex changes lanes
            script = [chain_name(i, ti)]
            relevel = (chain_name(i, ti), j)
        elif mij == 4:
            v1, v2 = chain_name(i, ti), chain_name(j, tj)
            script = [v2, v1, v2]
        elif mij == 6:
            v1, v2 = chain_name(i, ti), chain_name(i, ti + 1)
            v3, v4 = chain_name(j, tj), chain_name(j, tj + 1)
            script = [v4, v3, v2, v1, v4, v2, v4, v3, v1, v4]
        else:  # pragma: no cover
            raise MoveNotApplicable("commuting letters need no mutation")
        moved_seg = tuple((1 if a > 0 else -1) * (j if t % 2 == 0 else i) for t in range(mij))
        new_letters = ls[: p - 1] + moved_seg + ls[p - 1 + mij :]
    elif (a > 0) == (b > 0) and abs(a) == abs(b):
        raise MoveNotApplicable("same letter twice is not reduced")
    else:
        # commuting mixed swap
        new_letters = ls[: p - 1] + (b, a) + ls[p + 1 :]
        script = []

    mutated = wq.quiver.mutate_sequence(script)
    if relevel is not None:
        mutated = mutated.with_level(*relevel)
    target = word_quiver(rd, Word.of(new_letters), wq.view)
    iso = quiver_isomorphic(mutated, target.quiver, level_preserving=True)
    if iso is None:
        raise MoveNotApplicable("mutated quiver is not isomorphic to the moved word quiver")
    return target, script, iso


# ---------------------------------------------------------------------------
# primary coordinates


def primary_lattice_vectors(wq: WordQuiver) -> dict[str, Vec]:
    """Lattice vectors of the primary coordinates P_s, L_i, R_i.

    Solves the monomial transition X_{i choose k} <-> (L, P, R) of the
    triangle chart for an unbarred reduced word of w_0.  Keys are
    "P1".."Pm", "L1".."Lr", "R1".."Rr"; values are ambient vectors of the
    Jbar-view quiver lattice.
    """
    rd, w, q = wq.rd, wq.word, wq.quiver
    if not w.is_unbarred():
        raise ValueError("primary coordinates require an unbarred word")
    if wq.view != "Jbar":
        raise ValueError("primary coordinates are defined on the Jbar view")
    m, r = len(w), rd.rank
    unknowns = [f"P{s}" for s in range(1, m + 1)] + [f"L{i}" for i in rd.index_set] + [
        f"R{i}" for i in rd.index_set
    ]
    cols = {u: t for t, u in enumerate(unknowns)}
    n_unk = len(unknowns)

    betas = beta_sequence(rd, w)
    rows: list[list[Fraction]] = []
    rhs_names: list[str] = []

    def empty_row():
        return [Fraction(0)] * n_unk

    for i in rd.index_set:
        ni = w.occurrences(i)
        ps = [p for p in range(1, m + 1) if abs(w.letters[p - 1]) == i]
        for k in range(ni + 1):
            row = empty_row()
            if k == 0:
                row[cols[f"L{star(rd, i)}"]] += 1
                row[cols[f"P{ps[0]}"]] -= 1
                between = range(1, ps[0])
            elif k < ni:
                row[cols[f"P{ps[k-1]}"]] -= 1
                row[cols[f"P{ps[k]}"]] -= 1
                between = range(ps[k - 1] + 1, ps[k])
            else:
                row[cols[f"R{star(rd, i)}"]] += 1
                row[cols[f"P{ps[-1]}"]] -= 1
                between = range(ps[-1] + 1, m + 1)
            for s in between:
                js = abs(w.letters[s - 1])
                row[cols[f"P{s}"]] -= Fraction(rd.cartan[i - 1][js - 1])
            rows.append(row)
            rhs_names.append(chain_name(i, k))
    for p in range(1, m + 1):
        lvl = beta_level(rd, betas[p - 1])
        if lvl is not None:
            row = empty_row()
            row[cols[f"P{p}"]] += 1
            rows.append(row)
            rhs_names.append(h_name(lvl, barred=False))

    if len(rows) != n_unk:
        raise SingularTransition(f"transition system is {len(rows)} x {n_unk}")
    try:
        minv = inverse(mat(rows))
    except ValueError as exc:
        raise SingularTransition("transition matrix is singular") from exc

    out: dict[str, Vec] = {}
    dim = q.ambient_dim
    basis_of = {name: q.basis_vector(name) for name in rhs_names}
    for u, t in cols.items():
        v = [Fraction(0)] * dim
        for rr, name in enumerate(rhs_names):
            c = minv[t][rr]
            if c:
                bv = basis_of[name]
                for x in range(dim):
                    v[x] += c * bv[x]
        out[u] = tuple(v)
    return out


def poisson_bracket(q: Quiver, v: Vec, w: Vec) -> Fraction:
    """{log X_v, log X_w} = 2 <v, w>."""
    return 2 * bilinear(q.form, v, w)

"""Named mutation scripts: Weyl sequences, braid shifts, and the DT sequence.

Disc quivers model a once-punctured disc with d special points: the arcs
carry the words i, i*, i, i*, ... and the elementary pieces are amalgamated
cyclically, closing every level lane into a polygon.  The extra vertex of
each letter survives as a frozen vertex on the "bottom" lane.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from qcluster.cartan import RootDatum, Word, chain_roots, is_reduced, longest_word, star
from qcluster.linalg import Mat, Vec, identity, mat, matmul, transpose
from qcluster.mutation import Step, mut, perm, run_script, sequence_signature
from qcluster.quiver import Quiver, amalgamate, quiver_isomorphic
from qcluster.wordquiver import chain_name, elementary_quiver, word_quiver

__all__ = [
    "DiscQuiver",
    "NotAdmissible",
    "WordConventionMismatch",
    "disc_quiver",
    "weyl_sequence",
    "dt_sequence",
    "dt_sigma",
    "BraidShift",
    "braid_shift_sequence",
    "CheckResult",
    "verify_sequence_claims",
]


class NotAdmissible(ValueError):
    pass


class WordConventionMismatch(ValueError):
    pass


def slot_name(level: int, t: int) -> str:
    return f"L{level}:{t}"


def e_name(pos: int) -> str:
    return f"H:{pos}"


@dataclass(frozen=True)
class DiscQuiver:
    """Cyclically amalgamated quiver of a punctured disc with d special points.

    letters:   the circle word (concatenation of the arc words), 1-based
    arc_of:    circle position -> arc index (1..d)
    lanes:     level -> cyclic list of lane elements; slots are named
               "L{i}:{t}" and extra vertices "H:{p}"; the seam slot of
               special point s_k at a given level is the slot whose gap
               contains the seam.
    """

    rd: RootDatum
    quiver: Quiver
    word: Word
    d_points: int
    letters: tuple[int, ...]
    seam_slot: tuple[tuple[tuple[int, int], str], ...]

    def seam(self, k: int, level: int) -> str:
        """The level slot whose gap contains the special point s_k."""
        return dict(self.seam_slot)[(k, level)]


def _slot_containing(ps: Sequence[int], total: int, x: Fraction) -> int:
    """1-based index of the cyclic gap (ps[t-1], ps[t]) containing position x."""
    m = len(ps)
    for t in range(1, m + 1):
        lo = ps[t - 1]
        hi = ps[t % m] + (total if t == m else 0)
        xs = [x, x + total]
        if any(lo < xx < hi for xx in xs):
            return t
    raise RuntimeError("no slot found")


def disc_quiver(rd: RootDatum, word: Word, d_points: int = 2) -> DiscQuiver:
    """Build the disc quiver for the alternating pattern word, word*, ..."""
    if d_points < 2 or d_points % 2:
        raise NotAdmissible("the even-count convention needs d >= 2 even")
    if not (word.is_unbarred() and is_reduced(rd, word)):
        raise ValueError("disc quivers need an unbarred reduced word")
    arcs = [word if k % 2 == 0 else word.starred(rd) for k in range(d_points)]
    letters: list[int] = []
    arc_of: list[int] = []
    for k, arc in enumerate(arcs):
        for x in arc.letters:
            letters.append(x)
            arc_of.append(k + 1)
    m_total = len(letters)

    for i in rd.index_set:
        if sum(1 for x in letters if x == i) <= 1:
            raise NotAdmissible(f"level {i} has at most one letter on the circle")

    pieces = [elementary_quiver(rd, x, with_extra=True) for x in letters]
    occ: dict[int, list[int]] = {j: [] for j in rd.index_set}
    for p, x in enumerate(letters):
        occ[x].append(p + 1)

    gluing: dict[tuple[int, str], str] = {}
    levels: dict[str, int | None] = {}
    seam_slots: list[tuple[tuple[int, int], str]] = []
    arc_len = len(word)
    for j in rd.index_set:
        ps = occ[j]
        mj = len(ps)
        # slot t (1-based) fuses r-side of occurrence t, the passive level-j
        # slots strictly after it, and the l-side of occurrence t+1 (cyclic)
        for t in range(1, mj + 1):
            name = slot_name(j, t)
            levels[name] = j
            lo = ps[t - 1]
            hi = ps[t % mj] + (m_total if t == mj else 0)
            gluing[(lo - 1, "r")] = name
            for p0 in range(lo + 1, hi):
                p = (p0 - 1) % m_total + 1
                if letters[p - 1] != j:
                    gluing[(p - 1, str(j))] = name
            gluing[((hi - 1) % m_total, "l")] = name
        # special point s_k sits just before circle position (k-1) * arc_len + 1
        for k in range(1, d_points + 1):
            x = Fraction(2 * ((k - 1) * arc_len % m_total) + 1, 2)
            seam_slots.append(((k, j), slot_name(j, _slot_containing(ps, m_total, x))))
    for p in range(1, m_total + 1):
        name = e_name(p)
        gluing[(p - 1, "e")] = name
        levels[name] = None

    glued, _prov = amalgamate(pieces, gluing, levels=levels)
    all_slots = [slot_name(j, t) for j in rd.index_set for t in range(1, len(occ[j]) + 1)]
    glued = glued.defrost(all_slots)

    # polygon-neighbour condition: sum of eps over each level polygon vanishes
    for j in rd.index_set:
        poly = [slot_name(j, t) for t in range(1, len(occ[j]) + 1)]
        for w in glued.names:
            if w in poly:
                continue
            total = sum(glued.eps(v, w) for v in poly)
            assert total == 0, f"level polygon condition fails at {w}"

    dedup: dict[tuple[int, int], str] = {}
    for key, s in seam_slots:
        dedup.setdefault(key, s)
    return DiscQuiver(rd, glued, word, d_points, tuple(letters), tuple(dedup.items()))


def lane_cycle(dq: DiscQuiver, level: int) -> list[str]:
    """The level lane around the circle: slots interleaved with e-vertices."""
    ps = [p for p, x in enumerate(dq.letters, start=1) if x == level]
    out: list[str] = []
    for t, p in enumerate(ps, start=1):
        out.append(e_name(p))
        out.append(slot_name(level, t))
    return out


def weyl_sequence(dq: DiscQuiver, i: int) -> list[Step]:
    """S_i over the ordered level-i polygon (mutations and one transposition)."""
    ps = [p for p, x in enumerate(dq.letters, start=1) if x == i]
    m = len(ps)
    if m <= 1:
        raise NotAdmissible(f"level {i} polygon too small")
    vs = [slot_name(i, t) for t in range(1, m + 1)]
    up = [mut(v) for v in vs[:-1]]
    swap = perm({vs[-2]: vs[-1], vs[-1]: vs[-2]})
    return up + [swap] + [mut(v) for v in reversed(vs[:-1])]


# ---------------------------------------------------------------------------
# DT sequence


def dt_sequence(rd: RootDatum, word: Word) -> tuple[list[Step], dict[str, str]]:
    """P(i) = sigma . L_m . ... . L_1 on the word quiver of a w_0-word.

    Returns the script (with the final unfrozen relabeling sigma included as
    a perm step) and sigma itself.
    """
    if not (word.is_unbarred() and is_reduced(rd, word)):
        raise ValueError("dt_sequence needs an unbarred reduced word")
    letters = word.letters
    m = len(letters)
    script: list[Step] = []
    for k in range(1, m + 1):
        i = letters[k - 1]
        t_k = sum(1 for x in letters[k:] if x == i)
        script.extend(mut(chain_name(i, c)) for c in range(1, t_k + 1))
    sigma: dict[str, str] = {}
    for i in rd.index_set:
        ni = word.occurrences(i)
        for c in range(1, ni):
            sigma[chain_name(i, c)] = chain_name(i, ni - c)
    sigma = {k: v for k, v in sigma.items() if k != v}
    if sigma:
        script.append(perm(sigma))
    return script, sigma


def dt_sigma_length(rd: RootDatum, word: Word) -> int:
    letters = word.letters
    return sum(
        sum(1 for x in letters[k:] if x == letters[k - 1]) for k in range(1, len(letters) + 1)
    )


def dt_sigma(rd: RootDatum, word: Word) -> dict[str, str]:
    return dt_sequence(rd, word)[1]


def dt_frozen_permutation(rd: RootDatum, word: Word) -> dict[str, str]:
    """tau: l_i -> b_{i*}, b_i -> r_{i*}, r_i -> l_{i*} on the frozen vertices.

    Vertex dictionary: l_i = {i choose 0}, b_i = {i choose -inf}, and
    r_i = {i* choose n_{i*}} (the side-31 vertex of level i is starred).
    """
    from qcluster.wordquiver import h_name

    tau: dict[str, str] = {}
    for i in rd.index_set:
        ist = star(rd, i)
        ni = word.occurrences(i)
        # l_i -> b_{i*}
        tau[chain_name(i, 0)] = h_name(ist, barred=False)
        # b_i -> r_{i*} = {i choose n_i}
        tau[h_name(i, barred=False)] = chain_name(i, ni)
        # r_{i*} -> l_{i**}: vertex {i choose n_i} -> {i choose 0}
        tau[chain_name(i, ni)] = chain_name(i, 0)
    return tau


# ---------------------------------------------------------------------------
# braid shift on the (K, P) coordinate torus


@dataclass(frozen=True)
class BraidShift:
    """T(s_i) on the disc's (K, P) coordinates as an exact monomial map.

    Coordinates are ordered K_{k,j} (k arc, j in I) then P_{k,s}; `matrix`
    has rows = exponent vectors of the pulled-back coordinates:
    row(target) = exponents of T(s_i)^* X'_target in the source chart.
    """

    rd: RootDatum
    word: Word
    d_points: int
    i: int
    names: tuple[str, ...]
    matrix: Mat

    def index(self, name: str) -> int:
        return self.names.index(name)

    def compose(self, other: "BraidShift") -> Mat:
        """Matrix of self^* followed by other^* (pullback composition)."""
        return matmul(self.matrix, other.matrix)


def kp_names(rd: RootDatum, word: Word, d_points: int) -> tuple[str, ...]:
    names = [f"K{k}:{j}" for k in range(1, d_points + 1) for j in rd.index_set]
    names += [f"P{k}:{s}" for k in range(1, d_points + 1) for s in range(1, len(word) + 1)]
    return tuple(names)


def kp_bracket_matrix(rd: RootDatum, word: Word, d_points: int) -> Mat:
    """{log -, log -} table for the disc's (K, P) coordinates.

    Derived compositionally: each arc k is a triangle chart with its own
    (L, R, P) coordinates and bracket table; the Cartan coordinates at the
    special points are K_{k,j} = R_{k-1, s(j)} L_{k, s(j)} with s = id on
    odd arcs and s = * on even ones.
    """
    m = len(word)
    r = rd.rank
    # auxiliary log-lattice: per arc (1-based): L_{k,j}, R_{k,j}, P_{k,s}
    aux: list[str] = []
    for k in range(1, d_points + 1):
        aux += [f"L{k}:{j}" for j in rd.index_set]
        aux += [f"R{k}:{j}" for j in rd.index_set]
        aux += [f"P{k}:{s}" for s in range(1, m + 1)]
    aidx = {name: t for t, name in enumerate(aux)}
    nb = len(aux)
    base = [[Fraction(0)] * nb for _ in range(nb)]
    for k in range(1, d_points + 1):
        arc_word = word if k % 2 == 1 else word.starred(rd)
        roots = chain_roots(rd, arc_word)

        def put(a: str, bname: str, val: Fraction) -> None:
            base[aidx[a]][aidx[bname]] += val
            base[aidx[bname]][aidx[a]] -= val

        for i in rd.index_set:
            for j in rd.index_set:
                # {log L_i, log R_{j*}} = <alpha_i, alpha_j>
                put(f"L{k}:{i}", f"R{k}:{star(rd, j)}", rd.root_form(rd.simple_root(i), rd.simple_root(j)))
        for s in range(1, m + 1):
            for t in range(s + 1, m + 1):
                put(f"P{k}:{s}", f"P{k}:{t}", rd.root_form(roots[s - 1], roots[t - 1]))
        for j in rd.index_set:
            for s in range(1, m + 1):
                val = rd.root_form(rd.simple_root(j), roots[s - 1])
                # {log L_j, log P_s} = {log P_s, log R_{j*}} = <alpha_j, alpha_s>
                put(f"L{k}:{j}", f"P{k}:{s}", val)
                put(f"P{k}:{s}", f"R{k}:{star(rd, j)}", val)
    # expansion of the (K, P) coordinates in the auxiliary lattice
    names = kp_names(rd, word, d_points)
    rows = []
    for name in names:
        v = [Fraction(0)] * nb
        if name.startswith("K"):
            k, j = name[1:].split(":")
            k, j = int(k), int(j)
            jj = j if k % 2 == 1 else star(rd, j)
            k_prev = (k - 2) % d_points + 1
            v[aidx[f"R{k_prev}:{jj}"]] = Fraction(1)
            v[aidx[f"L{k}:{jj}"]] = Fraction(1)
        else:
            v[aidx[name]] = Fraction(1)
        rows.append(tuple(v))
    expand = tuple(rows)
    return matmul(matmul(expand, mat(base)), transpose(expand))


def braid_shift_sequence(rd: RootDatum, word: Word, d_points: int, i: int) -> BraidShift:
    """T(s_i) for a word starting with the letter i."""
    if word.letters[0] != i:
        raise WordConventionMismatch(f"word must start with {i}")
    names = kp_names(rd, word, d_points)
    idx = {name: k for k, name in enumerate(names)}
    m = len(word)
    n = len(names)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, d_points + 1):
        k_next = k % d_points + 1
        for s in range(1, m):
            rows[idx[f"P{k}:{s}"]][idx[f"P{k}:{s+1}"]] = Fraction(1)
        rows[idx[f"P{k}:{m}"]][idx[f"P{k_next}:1"]] = Fraction(1)
        rows[idx[f"P{k}:{m}"]][idx[f"K{k_next}:{i}"]] = Fraction(-1)
        for j in rd.index_set:
            rows[idx[f"K{k}:{j}"]][idx[f"K{k}:{j}"]] = Fraction(1)
            rows[idx[f"K{k}:{j}"]][idx[f"K{k}:{i}"]] += Fraction(-rd.cartan[j - 1][i - 1])
    return BraidShift(rd, word, d_points, i, names, mat(rows))


def bracket_preserved(shift: BraidShift, b_source: Mat, b_target: Mat) -> bool:
    """M B_source M^t == B_target for the pullback exponent matrix M."""
    return matmul(matmul(shift.matrix, b_source), transpose(shift.matrix)) == b_target


# ---------------------------------------------------------------------------
# claim harness


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def verify_sequence_claims(claims: Sequence[tuple[str, Callable[[], str | None]]]) -> list[CheckResult]:
    """Run claims; a claim returns None on success or a failure message."""
    out = []
    for name, fn in claims:
        try:
            detail = fn()
            out.append(CheckResult(name, detail is None, detail or ""))
        except Exception as exc:  # noqa: BLE001 - report, do not crash the harness
            out.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return out

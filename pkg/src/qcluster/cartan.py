"""Root data for finite-type semisimple Lie algebras and reduced-word combinatorics.

Words live in the product W x W of two copies of the Weyl group: positive
letters act in the first factor, negative ("barred") letters in the second.
Coroot and root vectors are kept in the coroot/root basis as tuples of
Fractions over both factors stacked as (first factor, second factor).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from qcluster.linalg import Vec, vec

__all__ = [
    "RootDatum",
    "Word",
    "NotReduced",
    "NotSameElement",
    "SearchBoundExceeded",
    "MoveScript",
]


class NotReduced(ValueError):
    pass


class NotSameElement(ValueError):
    pass


class SearchBoundExceeded(RuntimeError):
    pass


def _chain(n: int) -> list[list[int]]:
    c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i in range(n - 1):
        c[i][i + 1] = -1
        c[i + 1][i] = -1
    return c


def _simple_cartan(family: str, n: int) -> tuple[list[list[int]], list[int]]:
    """Cartan matrix C_ij = (alpha_i, alpha_j^vee) and multipliers d."""
    if family == "A":
        return _chain(n), [1] * n
    if family == "B":
        # vertex 1 carries d=2 (C_12 = -1, C_21 = -2), the rest a simply-laced chain
        if n < 2:
            raise ValueError("B_n needs n >= 2")
        c = _chain(n)
        c[0][1] = -1
        c[1][0] = -2
        return c, [2] + [1] * (n - 1)
    if family == "C":
        if n < 2:
            raise ValueError("C_n needs n >= 2")
        c = _chain(n)
        c[0][1] = -2
        c[1][0] = -1
        return c, [1] + [2] * (n - 1)
    if family == "D":
        if n < 3:
            raise ValueError("D_n needs n >= 3")
        c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        # fork at the first chain vertex: 1-3, 2-3, 3-4-...-n
        for i in range(2, n - 1):
            c[i][i + 1] = c[i + 1][i] = -1
        c[0][2] = c[2][0] = -1
        c[1][2] = c[2][1] = -1
        return c, [1] * n
    if family == "E":
        if n not in (6, 7, 8):
            raise ValueError("E_n needs n in {6,7,8}")
        # Bourbaki labels: chain 1-3-4-5-...-n with 2 attached to 4
        c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        chain = [1, 3, 4, 5, 6, 7, 8][: n - 1]
        for a, b in zip(chain, chain[1:]):
            c[a - 1][b - 1] = c[b - 1][a - 1] = -1
        c[1][3] = c[3][1] = -1
        return c, [1] * n
    if family == "F":
        if n != 4:
            raise ValueError("F requires rank 4")
        c = _chain(4)
        c[1][2] = -2
        c[2][1] = -1
        return c, [2, 2, 1, 1]
    if family == "G":
        if n != 2:
            raise ValueError("G requires rank 2")
        return [[2, -1], [-3, 2]], [3, 1]
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class RootDatum:
    """Cartan matrix with symmetrizers for a product of finite simple types."""

    type_label: str
    cartan: tuple[tuple[int, ...], ...]
    d: tuple[int, ...]

    @staticmethod
    def of(type_label: str) -> "RootDatum":
        blocks = []
        ds: list[int] = []
        for part in type_label.replace("*", "x").split("x"):
            part = part.strip()
            if not part:
                continue
            family, rank = part[0].upper(), int(part[1:])
            c, d = _simple_cartan(family, rank)
            blocks.append(c)
            ds.extend(d)
        n = sum(len(b) for b in blocks)
        c_full = [[0] * n for _ in range(n)]
        off = 0
        for b in blocks:
            for i, row in enumerate(b):
                for j, x in enumerate(row):
                    c_full[off + i][off + j] = x
            off += len(b)
        rd = RootDatum(type_label, tuple(tuple(r) for r in c_full), tuple(ds))
        rd._check()
        return rd

    def _check(self) -> None:
        n = self.rank
        for i in range(n):
            assert self.cartan[i][i] == 2
            for j in range(n):
                if i != j:
                    assert self.cartan[i][j] <= 0
                    assert (self.cartan[i][j] == 0) == (self.cartan[j][i] == 0)
                # C_ij / d_j symmetric
                assert Fraction(self.cartan[i][j], self.d[j]) == Fraction(self.cartan[j][i], self.d[i])

    @property
    def rank(self) -> int:
        return len(self.cartan)

    @property
    def index_set(self) -> range:
        return range(1, self.rank + 1)

    def braid_order(self, i: int, j: int) -> int:
        """Order m_ij of s_i s_j in the Weyl group."""
        p = self.cartan[i - 1][j - 1] * self.cartan[j - 1][i - 1]
        return {0: 2, 1: 3, 2: 4, 3: 6}[p]

    # -- reflections ---------------------------------------------------

    def reflect_coroot(self, i: int, v: Vec) -> Vec:
        """s_i acting on a vector in the coroot basis: v - <alpha_i, v> alpha_i^vee."""
        pairing = sum(Fraction(self.cartan[i - 1][k]) * v[k] for k in range(self.rank))
        return tuple(v[k] - (pairing if k == i - 1 else 0) for k in range(self.rank))

    def reflect_root(self, i: int, v: Vec) -> Vec:
        """s_i acting on a vector in the root basis: v - <v, alpha_i^vee> alpha_i."""
        pairing = sum(v[k] * Fraction(self.cartan[k][i - 1]) for k in range(self.rank))
        return tuple(v[k] - (pairing if k == i - 1 else 0) for k in range(self.rank))

    def simple_coroot(self, i: int) -> Vec:
        return tuple(Fraction(1 if k == i - 1 else 0) for k in range(self.rank))

    simple_root = simple_coroot  # same coordinates in their own basis

    def pair_root_coroot(self, root: Vec, coroot: Vec) -> Fraction:
        """(lambda, v) for lambda in the root lattice and v in the coroot lattice."""
        return sum(
            (root[i] * Fraction(self.cartan[i][j]) * coroot[j] for i in range(self.rank) for j in range(self.rank)),
            Fraction(0),
        )

    def root_form(self, a: Vec, b: Vec) -> Fraction:
        """Symmetric form <alpha_i, alpha_j> = C_ij / d_j on the root lattice."""
        return sum(
            (a[i] * Fraction(self.cartan[i][j], self.d[j]) * b[j] for i in range(self.rank) for j in range(self.rank)),
            Fraction(0),
        )


@dataclass(frozen=True)
class Word:
    """A word in W x W; positive letters unbarred, negative letters barred."""

    letters: tuple[int, ...]

    @staticmethod
    def of(letters: Iterable[int]) -> "Word":
        ls = tuple(int(x) for x in letters)
        if any(x == 0 for x in ls):
            raise ValueError("letters are nonzero signed indices")
        return Word(ls)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    @property
    def unbarred(self) -> tuple[int, ...]:
        return tuple(x for x in self.letters if x > 0)

    @property
    def barred(self) -> tuple[int, ...]:
        return tuple(-x for x in self.letters if x < 0)

    def is_unbarred(self) -> bool:
        return all(x > 0 for x in self.letters)

    def starred(self, rd: RootDatum) -> "Word":
        return Word(tuple((1 if x > 0 else -1) * star(rd, abs(x)) for x in self.letters))

    def occurrences(self, level: int) -> int:
        """Number of letters at the given level (barred or not)."""
        return sum(1 for x in self.letters if abs(x) == level)

    def to_json(self) -> list[int]:
        return list(self.letters)

    @staticmethod
    def from_json(data: Sequence[int]) -> "Word":
        return Word.of(data)


# -- Weyl group machinery ----------------------------------------------


def weyl_act(rd: RootDatum, w: Word, v: Vec) -> Vec:
    """Apply s_{i_1}...s_{i_m} to a coroot vector (rightmost reflection first)."""
    if not w.is_unbarred():
        raise ValueError("weyl_act expects an unbarred word")
    out = vec(v)
    for i in reversed(w.letters):
        out = rd.reflect_coroot(i, out)
    return out


def _perm_of_word(rd: RootDatum, letters: Sequence[int]) -> tuple[Vec, ...]:
    """Matrix of the product of reflections on the coroot lattice (columns = images)."""
    cols = []
    for k in range(rd.rank):
        v = rd.simple_coroot(k + 1)
        for i in reversed(letters):
            v = rd.reflect_coroot(i, v)
        cols.append(v)
    return tuple(cols)


def length(rd: RootDatum, letters: Sequence[int]) -> int:
    """Length of the product s_{i_1}...s_{i_m}, by counting inversions."""
    n = sum(1 for _ in positive_coroots(rd))
    return sum(1 for beta in positive_coroots(rd) if not _is_positive(_act_letters(rd, letters, beta)))


def _act_letters(rd: RootDatum, letters: Sequence[int], v: Vec) -> Vec:
    out = v
    for i in reversed(list(letters)):
        out = rd.reflect_coroot(i, out)
    return out


def _is_positive(v: Vec) -> bool:
    return all(x >= 0 for x in v) and any(x > 0 for x in v)


@lru_cache(maxsize=None)
def _positive_coroots_cached(rd: RootDatum) -> tuple[Vec, ...]:
    todo = [rd.simple_coroot(i) for i in rd.index_set]
    seen = set(todo)
    while todo:
        v = todo.pop()
        for i in rd.index_set:
            w = rd.reflect_coroot(i, v)
            if _is_positive(w) and w not in seen:
                seen.add(w)
                todo.append(w)
    return tuple(sorted(seen))


def positive_coroots(rd: RootDatum) -> tuple[Vec, ...]:
    return _positive_coroots_cached(rd)


def is_reduced(rd: RootDatum, w: Word) -> bool:
    """True iff both factors of the word are reduced."""
    for letters in (w.unbarred, w.barred):
        if length(rd, letters) != len(letters):
            return False
    return True


def longest_word(rd: RootDatum) -> Word:
    """Lexicographically least reduced word for w_0 (greedy descent search)."""
    n = len(positive_coroots(rd))
    letters: list[int] = []
    # Greedy: always take the least i that increases length; this yields the
    # lexicographically least reduced word of w_0.
    current_len = 0
    while current_len < n:
        for i in rd.index_set:
            if length(rd, letters + [i]) == current_len + 1:
                letters.append(i)
                current_len += 1
                break
        else:  # pragma: no cover
            raise RuntimeError("no ascent found")
    return Word.of(letters)


@lru_cache(maxsize=None)
def _w0_matrix(rd: RootDatum) -> tuple[Vec, ...]:
    return _perm_of_word(rd, longest_word(rd).letters)


def star(rd: RootDatum, i: int) -> int:
    """The Dynkin involution i*, defined by alpha_{i*}^vee = -w_0(alpha_i^vee)."""
    m = _w0_matrix(rd)
    img = tuple(-x for x in m[i - 1])
    for j in rd.index_set:
        if img == rd.simple_coroot(j):
            return j
    raise RuntimeError("w_0 does not permute simple coroots; bad root datum")


def beta_sequence(rd: RootDatum, w: Word) -> tuple[Vec, ...]:
    """Chain of positive coroots attached to a reduced word of (u, v).

    Unbarred letters use the suffix action beta_k = s_{i_m}...s_{i_{k+1}}(a_{i_k})
    over the unbarred letters of the suffix; barred letters use the prefix
    action beta_k = s_{i_1}...s_{i_{k-1}}(a_{i_k}) over the barred prefix.
    Vectors live in the coroot basis; a second copy is kept implicit via the
    sign of the position's letter.
    """
    if not is_reduced(rd, w):
        raise NotReduced(f"word {w.letters} is not reduced")
    betas: list[Vec] = []
    for k, letter in enumerate(w.letters):
        v = rd.simple_coroot(abs(letter))
        if letter > 0:
            # suffix acts with s_{i_{k+1}} first
            ops = [x for x in w.letters[k + 1 :] if x > 0][::-1]
        else:
            # prefix acts with s_{i_{k-1}} first
            ops = [-x for x in w.letters[:k] if x < 0]
        v = _act_letters(rd, ops, v)
        if not _is_positive(v):
            raise RuntimeError("beta chain left the positive cone; convention bug")
        betas.append(v)
    # distinctness within each factor
    for sign in (1, -1):
        seen = [betas[k] for k in range(len(betas)) if (w.letters[k] > 0) == (sign > 0)]
        assert len(seen) == len({tuple(v) for v in seen}), "beta chain not distinct"
    return tuple(betas)


def chain_roots(rd: RootDatum, w: Word) -> tuple[Vec, ...]:
    """Root-lattice companions of beta_sequence (same reflections on roots)."""
    if not is_reduced(rd, w):
        raise NotReduced(f"word {w.letters} is not reduced")
    roots: list[Vec] = []
    for k, letter in enumerate(w.letters):
        v = rd.simple_root(abs(letter))
        if letter > 0:
            ops = [x for x in w.letters[k + 1 :] if x > 0][::-1]
        else:
            ops = [-x for x in w.letters[:k] if x < 0]
        out = v
        for i in reversed(ops):
            out = rd.reflect_root(i, out)
        roots.append(out)
    return tuple(roots)


def simple_positions(rd: RootDatum, w: Word) -> tuple[int, ...]:
    """1-based positions k whose chain coroot beta_k is simple."""
    betas = beta_sequence(rd, w)
    simple = {rd.simple_coroot(i): i for i in rd.index_set}
    return tuple(k + 1 for k, b in enumerate(betas) if b in simple)


def beta_level(rd: RootDatum, beta: Vec) -> int | None:
    for i in rd.index_set:
        if beta == rd.simple_coroot(i):
            return i
    return None


def i_w(rd: RootDatum, w: Word) -> tuple[int, ...]:
    """I(w) = { j : w(alpha_j^vee) < 0 } for an unbarred word."""
    if not w.is_unbarred():
        raise ValueError("i_w expects an unbarred word")
    out = []
    for j in rd.index_set:
        if not _is_positive(_act_letters(rd, w.letters, rd.simple_coroot(j))):
            out.append(j)
    return tuple(out)


def rho_w(rd: RootDatum, w: Word) -> Vec:
    """Sum of the beta chain of a reduced unbarred word (word independent)."""
    if not w.is_unbarred():
        raise ValueError("rho_w expects an unbarred word")
    betas = beta_sequence(rd, w)
    total = tuple(Fraction(0) for _ in range(rd.rank))
    for b in betas:
        total = tuple(x + y for x, y in zip(total, b))
    return total


# -- elementary moves on words -----------------------------------------


@dataclass(frozen=True)
class Move:
    """Elementary move on a word: a braid relation or a mixed swap.

    position: 0-based start of the segment; kind: "braid" (segment of length
    m_ij within one factor) or "swap" (adjacent barred/unbarred commute).
    """

    kind: str
    position: int
    length: int = 2


MoveScript = tuple[Move, ...]


def apply_move(rd: RootDatum, w: Word, move: Move) -> Word:
    ls = list(w.letters)
    p, m = move.position, move.length
    seg = ls[p : p + m]
    if move.kind == "swap":
        if len(seg) != 2 or (seg[0] > 0) == (seg[1] > 0):
            raise ValueError("swap needs adjacent letters from different factors")
        ls[p : p + 2] = [seg[1], seg[0]]
        return Word.of(ls)
    if move.kind == "braid":
        signs = {x > 0 for x in seg}
        if len(signs) != 1:
            raise ValueError("braid segment must stay in one factor")
        vals = [abs(x) for x in seg]
        i, j = vals[0], vals[1]
        if vals != [(i if t % 2 == 0 else j) for t in range(m)] or rd.braid_order(i, j) != m:
            raise ValueError("segment is not an (i,j)-braid segment of the right length")
        sign = 1 if seg[0] > 0 else -1
        ls[p : p + m] = [sign * (j if t % 2 == 0 else i) for t in range(m)]
        return Word.of(ls)
    raise ValueError(f"unknown move kind {move.kind!r}")


def _candidate_moves(rd: RootDatum, w: Word) -> list[Move]:
    out: list[Move] = []
    ls = w.letters
    for p in range(len(ls) - 1):
        if (ls[p] > 0) != (ls[p + 1] > 0):
            out.append(Move("swap", p))
    for p in range(len(ls) - 1):
        if (ls[p] > 0) != (ls[p + 1] > 0):
            continue
        i, j = abs(ls[p]), abs(ls[p + 1])
        if i == j:
            continue
        m = rd.braid_order(i, j)
        if p + m <= len(ls):
            seg = ls[p : p + m]
            ok = all((x > 0) == (ls[p] > 0) for x in seg) and all(
                abs(x) == (i if t % 2 == 0 else j) for t, x in enumerate(seg)
            )
            if ok:
                out.append(Move("braid", p, m))
    return out


def word_move_plan(rd: RootDatum, a: Word, b: Word, bound: int = 14) -> MoveScript:
    """BFS over the reduced-word graph from a to b (Tits' theorem for W x W)."""
    if len(a) != len(b):
        raise NotSameElement("different lengths")
    if len(a) > bound:
        raise SearchBoundExceeded(f"combined length {len(a)} exceeds bound {bound}")
    if not (is_reduced(rd, a) and is_reduced(rd, b)):
        raise NotReduced("both words must be reduced")
    if _perm_of_word(rd, a.unbarred) != _perm_of_word(rd, b.unbarred) or _perm_of_word(
        rd, tuple(-x for x in a.letters if x < 0)
    ) != _perm_of_word(rd, tuple(-x for x in b.letters if x < 0)):
        raise NotSameElement("words do not represent the same element of W x W")
    start, goal = a.letters, b.letters
    frontier = [start]
    parents: dict[tuple[int, ...], tuple[tuple[int, ...], Move] | None] = {start: None}
    while frontier:
        nxt = []
        for cur in frontier:
            if cur == goal:
                break
            for mv in _candidate_moves(rd, Word(cur)):
                img = apply_move(rd, Word(cur), mv).letters
                if img not in parents:
                    parents[img] = (cur, mv)
                    nxt.append(img)
        if goal in parents:
            break
        frontier = sorted(nxt)
        if len(parents) > 200000:  # pragma: no cover
            raise SearchBoundExceeded("reduced-word graph search blew up")
    if goal not in parents:
        raise NotSameElement("no move path found")
    path: list[Move] = []
    cur = goal
    while parents[cur] is not None:
        prev, mv = parents[cur]  # type: ignore[misc]
        path.append(mv)
        cur = prev
    return tuple(reversed(path))

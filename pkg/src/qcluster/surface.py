"""Combinatorial triangulated polygons with an exact PGL2 oracle.

Surfaces here are triangulated polygons: vertices 0..n-1 counterclockwise,
triangles given as ccw triples.  Configurations carry exact rational
homogeneous lifts of the marked points; boundary pinnings are the
projectivized sums of adjacent lifts.  All cross-ratio arithmetic is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from qcluster.cartan import RootDatum, Word, beta_level, beta_sequence, is_reduced, star
from qcluster.mutation import Step, mut, run_script
from qcluster.quiver import Quiver, amalgamate, quiver_isomorphic
from qcluster.wordquiver import WordQuiver, chain_name, h_name, word_quiver

__all__ = [
    "TriangulatedPolygon",
    "SurfaceDatum",
    "PGL2Config",
    "DegenerateConfiguration",
    "BoundaryEdge",
    "FlipSearchExceeded",
    "pgl2_cross_ratio",
    "match_pinning",
    "surface_quiver",
    "pgl2_coordinates",
    "flip",
    "potential_expression",
    "geometric_potential",
    "pglm_triangle_quiver",
]


class DegenerateConfiguration(ArithmeticError):
    pass


class BoundaryEdge(ValueError):
    pass


class FlipSearchExceeded(RuntimeError):
    pass


Point = tuple[Fraction, Fraction]


def _omega(x: Point, y: Point) -> Fraction:
    return x[0] * y[1] - x[1] * y[0]


def pgl2_cross_ratio(x1: Point, x2: Point, x3: Point, x4: Point) -> Fraction:
    """r(x1,x2,x3,x4) = w(x1,x2) w(x3,x4) / (w(x1,x4) w(x2,x3)); lift-independent."""
    den = _omega(x1, x4) * _omega(x2, x3)
    if den == 0:
        raise DegenerateConfiguration("cross-ratio denominator vanishes")
    return _omega(x1, x2) * _omega(x3, x4) / den


def match_pinning(x1: Point, q: Point, x3: Point) -> Point:
    """The point p with r(x1, q, x3, p) = 1 (matched gluing of pinnings)."""
    # w(x1,q) w(x3,p) = w(x1,p) w(q,x3): linear in the lift of p
    a = _omega(x1, q)
    b = _omega(q, x3)
    # p = alpha x1 + beta x3 with a * w(x3, p) = b * w(x1, p)
    # w(x3, p) = alpha w(x3,x1); w(x1,p) = beta w(x1,x3)
    w31 = _omega(x3, x1)
    if w31 == 0:
        raise DegenerateConfiguration("x1 and x3 are not distinct")
    alpha = b
    beta = -a
    p = (alpha * x1[0] + beta * x3[0], alpha * x1[1] + beta * x3[1])
    if p == (0, 0):
        raise DegenerateConfiguration("degenerate pinning match")
    return p


# ---------------------------------------------------------------------------
# triangulated polygons


@dataclass(frozen=True)
class TriangulatedPolygon:
    """Polygon on vertices 0..n-1 (ccw) with a list of ccw triangles."""

    n: int
    triangles: tuple[tuple[int, int, int], ...]

    @staticmethod
    def fan(n: int, apex: int = 0) -> "TriangulatedPolygon":
        tris = []
        for k in range(1, n - 1):
            tris.append(tuple(sorted_ccw(n, (apex, (apex + k) % n, (apex + k + 1) % n))))
        return TriangulatedPolygon(n, tuple(tris))

    @staticmethod
    def of(n: int, triangles: Sequence[Sequence[int]]) -> "TriangulatedPolygon":
        return TriangulatedPolygon(n, tuple(tuple(sorted_ccw(n, tuple(t))) for t in triangles))

    def __post_init__(self):
        assert len(self.triangles) == self.n - 2, "not a triangulation of the polygon"

    def edges(self) -> list[tuple[int, int]]:
        out = set()
        for t in self.triangles:
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                out.add((min(a, b), max(a, b)))
        return sorted(out)

    def boundary_edges(self) -> list[tuple[int, int]]:
        return [(a, (a + 1) % self.n) if a < (a + 1) % self.n else ((a + 1) % self.n, a) for a in range(self.n)]

    def internal_edges(self) -> list[tuple[int, int]]:
        boundary = {tuple(sorted((a, (a + 1) % self.n))) for a in range(self.n)}
        return [e for e in self.edges() if e not in boundary]

    def triangles_of_edge(self, e: tuple[int, int]) -> list[tuple[int, int, int]]:
        a, b = e
        return [t for t in self.triangles if a in t and b in t]

    def quadrilateral(self, e: tuple[int, int]) -> tuple[int, int, int, int]:
        """(a, b, c, d) ccw with e = (a, c) the shared diagonal."""
        ts = self.triangles_of_edge(e)
        if len(ts) != 2:
            raise BoundaryEdge(f"{e} is not an internal edge")
        a, c = e
        t_left = next(t for t in ts if _follows(t, a, c))
        t_right = next(t for t in ts if _follows(t, c, a))
        b = next(v for v in t_left if v not in e)
        d = next(v for v in t_right if v not in e)
        return a, b, c, d

    def flip_edge(self, e: tuple[int, int]) -> "TriangulatedPolygon":
        a, b, c, d = self.quadrilateral(e)
        ts = [t for t in self.triangles if not (set(e) <= set(t))]
        ts.append(sorted_ccw(self.n, (b, c, d)))
        ts.append(sorted_ccw(self.n, (d, a, b)))
        return TriangulatedPolygon(self.n, tuple(sorted(ts)))


def sorted_ccw(n: int, t: Sequence[int]) -> tuple[int, int, int]:
    """Rotate a ccw triple so that it starts with its least vertex."""
    t = tuple(t)
    i = t.index(min(t))
    out = (t[i], t[(i + 1) % 3], t[(i + 2) % 3])
    # verify counterclockwise (increasing cyclic order on the polygon)
    a, b, c = out
    assert a < b < c or a < c < b  # will be validated by geometry below
    if not (a < b < c):
        out = (a, t[(i + 2) % 3], t[(i + 1) % 3])
        a, b, c = out
    assert a < b < c, f"triangle {t} is not a ccw polygon triple"
    return out


def _follows(t: tuple[int, int, int], a: int, c: int) -> bool:
    """True if walking ccw in t one passes a -> x -> c."""
    i = t.index(a)
    return t[(i + 2) % 3] == c


@dataclass(frozen=True)
class SurfaceDatum:
    """Triangulation plus a reduced word of w_0 and a base corner per triangle."""

    rd: RootDatum
    triangulation: TriangulatedPolygon
    words: tuple[Word, ...]

    @staticmethod
    def uniform(rd: RootDatum, tri: TriangulatedPolygon, word: Word | None = None) -> "SurfaceDatum":
        from qcluster.cartan import longest_word

        w = word if word is not None else longest_word(rd)
        if not is_reduced(rd, w) or not w.is_unbarred():
            raise ValueError("surface data needs unbarred reduced words of w_0")
        return SurfaceDatum(rd, tri, tuple(w for _ in tri.triangles))


def edge_name(e: tuple[int, int]) -> str:
    return f"E{e[0]}-{e[1]}"


def _side_vertex(rd: RootDatum, wq: WordQuiver, side: int, i: int) -> str:
    """Frozen vertex of a triangle chart on side 0/1/2 at level i.

    side 0 = (v1, v2): {i choose 0};  side 1 = (v2, v3): H vertex;
    side 2 = (v3, v1): {i* choose n_(i*)}.
    """
    if side == 0:
        return chain_name(i, 0)
    if side == 1:
        return h_name(i, barred=False)
    ist = star(rd, i)
    return chain_name(ist, wq.n_occ(ist))


def surface_quiver(datum: SurfaceDatum) -> Quiver:
    """Amalgamate triangle word quivers along shared edges; defrost internal edges."""
    rd = datum.rd
    tri = datum.triangulation
    pieces: list[Quiver] = []
    wqs: list[WordQuiver] = []
    for w in datum.words:
        wq = word_quiver(rd, w, view="Jbar")
        wqs.append(wq)
        pieces.append(wq.quiver)

    # which (triangle, side) pairs share each edge
    edge_sides: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for ti, t in enumerate(tri.triangles):
        for s in range(3):
            e = tuple(sorted((t[s], t[(s + 1) % 3])))
            edge_sides.setdefault(e, []).append((ti, s))

    gluing: dict[tuple[int, str], str] = {}
    levels: dict[str, int | None] = {}
    for e, sides in edge_sides.items():
        for pos, (ti, s) in enumerate(sides):
            for i in rd.index_set:
                # glue level i of the first chart to level i* of the second
                lvl = i if pos == 0 else star(rd, i)
                name = f"{edge_name(e)}:{i}"
                gluing[(ti, _side_vertex(rd, wqs[ti], s, lvl))] = name
                levels[name] = None
    # interior (unfrozen) vertices keep per-triangle names
    for ti, wq in enumerate(wqs):
        for v in wq.quiver.unfrozen:
            gluing[(ti, v)] = f"t{ti}:{v}"
    glued, _prov = amalgamate(pieces, gluing, levels=levels)
    internal = [f"{edge_name(e)}:{i}" for e in tri.internal_edges() for i in rd.index_set]
    return glued.defrost(internal)


# ---------------------------------------------------------------------------
# PGL2 coordinates


@dataclass(frozen=True)
class PGL2Config:
    """Exact homogeneous lifts of the polygon vertices.

    The pinning of boundary edge (a, a+1) is the projectivization of
    lift_a + lift_{a+1}.
    """

    lifts: tuple[Point, ...]

    @staticmethod
    def of(lifts: Sequence[Sequence]) -> "PGL2Config":
        return PGL2Config(tuple((Fraction(a), Fraction(b)) for a, b in lifts))

    @staticmethod
    def random(n: int, rng) -> "PGL2Config":
        while True:
            lifts = [(Fraction(rng.randint(-9, 9)), Fraction(rng.randint(-9, 9))) for _ in range(n)]
            ok = all(l != (0, 0) for l in lifts)
            ok = ok and all(
                _omega(lifts[i], lifts[j]) != 0 for i in range(n) for j in range(i + 1, n)
            )
            if ok:
                return PGL2Config(tuple(lifts))

    def pinning(self, a: int) -> Point:
        b = (a + 1) % len(self.lifts)
        p = (self.lifts[a][0] + self.lifts[b][0], self.lifts[a][1] + self.lifts[b][1])
        if p == (0, 0):
            raise DegenerateConfiguration("pinning lift vanishes")
        return p


def pgl2_coordinates(config: PGL2Config, tri: TriangulatedPolygon) -> dict[str, Fraction]:
    """Exact coordinate per edge: cross-ratios inside, pinning ratios on the boundary."""
    x = config.lifts
    out: dict[str, Fraction] = {}
    for e in tri.internal_edges():
        a, b, c, d = tri.quadrilateral(e)
        out[edge_name(e)] = pgl2_cross_ratio(x[a], x[b], x[c], x[d])
    for a in range(tri.n):
        b = (a + 1) % tri.n
        e = tuple(sorted((a, b)))
        t = next(t for t in tri.triangles if a in t and b in t and _follows(t, b, a))
        cvert = next(v for v in t if v not in (a, b))
        out[edge_name(e)] = pgl2_cross_ratio(x[b], x[cvert], x[a], config.pinning(a))
    return out


def geometric_potential(v: Point, u1: Point, u2: Point) -> Fraction:
    """Potential of the decorated vertex v between the lines spanned by u1, u2."""
    den = _omega(v, u1) * _omega(v, u2)
    if den == 0:
        raise DegenerateConfiguration("potential denominator vanishes")
    return _omega(u2, u1) / den


def corner_potential(config: PGL2Config, tri: TriangulatedPolygon, v: int) -> Fraction:
    """Geometric corner potential with the decoration fixed by the outgoing pinning.

    The pinning on (v, v+1) normalizes the lift of v, which rescales the raw
    potential by w(l_{v+1}, l_v).
    """
    x = config.lifts
    n = tri.n
    w = geometric_potential(x[v], x[(v + 1) % n], x[(v - 1) % n])
    return _omega(x[(v + 1) % n], x[v]) * w


def fan_edges(tri: TriangulatedPolygon, v: int) -> list[tuple[int, int]]:
    """Edges at the corner v, ccw from (v, v+1) to (v-1, v)."""
    incident = [e for e in tri.edges() if v in e]

    def other(e):
        return e[0] if e[1] == v else e[1]

    return sorted(incident, key=lambda e: (other(e) - v) % tri.n)


def potential_expression(tri: TriangulatedPolygon, v: int) -> list[list[str]]:
    """The corner potential as a list of monomials [E_1], [E_1,E_2], ...

    W_v = X_{E_1} + X_{E_1}X_{E_2} + ... + X_{E_1}...X_{E_{m-1}} over the
    ccw fan at the corner.
    """
    fan = fan_edges(tri, v)
    names = [edge_name(e) for e in fan]
    return [names[: k + 1] for k in range(len(names) - 1)]


def potential_value(tri: TriangulatedPolygon, v: int, coords: Mapping[str, Fraction]) -> Fraction:
    total = Fraction(0)
    for monomial in potential_expression(tri, v):
        term = Fraction(1)
        for name in monomial:
            term *= coords[name]
        total += term
    return total


# ---------------------------------------------------------------------------
# flips


def flip(
    datum: SurfaceDatum, e: tuple[int, int], bound: int = 6
) -> tuple[SurfaceDatum, list[Step], dict[str, str]]:
    """Flip an internal edge; return the new datum, a mutation script on the
    surface quiver, and the isomorphism (script image -> new quiver)."""
    tri = datum.triangulation
    if e not in tri.internal_edges():
        raise BoundaryEdge(str(e))
    new_tri = tri.flip_edge(e)
    new_datum = SurfaceDatum(datum.rd, new_tri, datum.words)
    q0 = surface_quiver(datum)
    q1 = surface_quiver(new_datum)
    boundary_names = [f"{edge_name(be)}:{i}" for be in tri.boundary_edges() for i in datum.rd.index_set]
    fixed = {b: b for b in boundary_names if b in q1.names}

    r = datum.rd.rank
    if r == 1:
        script = [mut(f"{edge_name(e)}:1")]
        iso = quiver_isomorphic(run_script(q0, script), q1, fixed=fixed)
        if iso is None:
            raise FlipSearchExceeded("single mutation does not realize the A1 flip")
        return new_datum, script, iso

    # small breadth-first search over mutation sequences
    frontier: list[tuple[Quiver, list[Step]]] = [(q0, [])]
    seen = 0
    for depth in range(bound):
        nxt: list[tuple[Quiver, list[Step]]] = []
        for q, script in frontier:
            iso = quiver_isomorphic(q, q1, fixed=fixed)
            if iso is not None:
                return new_datum, script, iso
            for k in q.unfrozen:
                if script and script[-1] == mut(k):
                    continue
                nxt.append((q.mutate(k), script + [mut(k)]))
                seen += 1
                if seen > 50000:
                    raise FlipSearchExceeded("mutation search exploded")
        frontier = nxt
    for q, script in frontier:
        iso = quiver_isomorphic(q, q1, fixed=fixed)
        if iso is not None:
            return new_datum, script, iso
    raise FlipSearchExceeded(f"no script within {bound} mutations")


# ---------------------------------------------------------------------------
# PGL_m triangle quivers


def pglm_triangle_quiver(m: int) -> Quiver:
    """Quiver on the m-triangulation lattice points of a triangle.

    Vertices: nonnegative (a1,a2,a3) with a1+a2+a3 = m minus the corners;
    arrows u -> u + eta for eta in {(0,1,-1), (-1,0,1), (1,-1,0)}, with
    weight 1/2 when both endpoints lie on the same side.
    """
    if m < 2:
        raise ValueError("m >= 2")
    pts = [
        (a, b, m - a - b)
        for a in range(m + 1)
        for b in range(m + 1 - a)
        if sum(x == 0 for x in (a, b, m - a - b)) < 2
    ]
    idx = {p: i for i, p in enumerate(pts)}
    names = [f"({p[0]},{p[1]},{p[2]})" for p in pts]
    eps = [[Fraction(0)] * len(pts) for _ in range(len(pts))]
    arrows = [(0, 1, -1), (-1, 0, 1), (1, -1, 0)]
    for p in pts:
        for eta in arrows:
            q = (p[0] + eta[0], p[1] + eta[1], p[2] + eta[2])
            if q in idx:
                w = Fraction(1)
                if any(p[k] == 0 and q[k] == 0 for k in range(3)):
                    w = Fraction(1, 2)
                eps[idx[p]][idx[q]] += w
                eps[idx[q]][idx[p]] -= w
    frozen = [names[idx[p]] for p in pts if 0 in p]
    return Quiver.from_exchange(eps, [1] * len(pts), frozen=frozen, names=names)

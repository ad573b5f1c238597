"""Quivers: a marked basis in a fixed ambient lattice with a skew form.

A quiver holds a basis {e_v} of (a sublattice of) an ambient rational vector
space carrying a fixed skew-symmetric form.  The exchange matrix is derived,

    eps(v, w) = <e_v, e_w> * d_w,

and mutation changes only the basis:  e'_i = e_i + [eps(i,k)]_+ e_k for
i != k and e'_k = -e_k.  Frozen vertices and multipliers ride along
unchanged.  Everything is exact (Fraction arithmetic).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from qcluster.linalg import Mat, Vec, bilinear, fraction_str, is_skew, mat, unit, vec

__all__ = [
    "Quiver",
    "FrozenVertex",
    "NonFrozenCollision",
    "MultiplierMismatch",
    "HalfIntegralArrow",
    "amalgamate",
    "quiver_isomorphic",
    "tropical_mutate",
    "frozen_tropical_point",
]


class FrozenVertex(ValueError):
    pass


class NonFrozenCollision(ValueError):
    pass


class MultiplierMismatch(ValueError):
    pass


class HalfIntegralArrow(ValueError):
    pass


@dataclass(frozen=True)
class Quiver:
    """Immutable quiver datum.

    names:   ordered vertex ids (stable strings)
    form:    skew-symmetric matrix of the ambient pairing <,>
    basis:   vertex id -> ambient vector
    frozen:  subset of vertex ids
    d:       vertex id -> positive multiplier
    levels:  vertex id -> level (int) or None for the "bottom" lane
    display: optional vertex id -> display name
    """

    names: tuple[str, ...]
    form: Mat
    basis: tuple[Vec, ...]
    frozen: frozenset[str]
    d: tuple[int, ...]
    levels: tuple[int | None, ...] = ()
    display: tuple[str, ...] = ()
    # rows = current basis in coordinates of the seed where tracking started;
    # used only to pick sign-coherent mutation signs (mu_k is then involutive)
    cmat: Mat = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        n = len(self.names)
        assert len(self.basis) == n and len(self.d) == n
        assert is_skew(self.form)
        if not self.levels:
            object.__setattr__(self, "levels", tuple(None for _ in range(n)))
        if not self.display:
            object.__setattr__(self, "display", tuple(self.names))
        if not self.cmat:
            object.__setattr__(self, "cmat", tuple(unit(n, i) for i in range(n)))
        assert len(self.names) == len(set(self.names)), "vertex ids must be unique"

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_exchange(
        eps: Sequence[Sequence],
        d: Sequence[int],
        frozen: Iterable[str],
        names: Sequence[str] | None = None,
        levels: Sequence[int | None] | None = None,
    ) -> "Quiver":
        """Build a quiver from an exchange matrix; basis = unit vectors."""
        n = len(eps)
        names = tuple(names) if names is not None else tuple(f"v{i}" for i in range(n))
        e = mat(eps)
        form = tuple(tuple(e[i][j] / Fraction(d[j]) for j in range(n)) for i in range(n))
        if not is_skew(form):
            raise ValueError("eps with these multipliers is not skew-symmetrizable")
        q = Quiver(
            names=names,
            form=form,
            basis=tuple(unit(n, i) for i in range(n)),
            frozen=frozenset(frozen),
            d=tuple(int(x) for x in d),
            levels=tuple(levels) if levels is not None else tuple(None for _ in range(n)),
        )
        q.check()
        return q

    # -- basic access --------------------------------------------------------

    @property
    def ambient_dim(self) -> int:
        return len(self.form)

    def index(self, v: str) -> int:
        return self.names.index(v)

    def basis_vector(self, v: str) -> Vec:
        return self.basis[self.index(v)]

    def multiplier(self, v: str) -> int:
        return self.d[self.index(v)]

    def level(self, v: str) -> int | None:
        return self.levels[self.index(v)]

    def is_frozen(self, v: str) -> bool:
        return v in self.frozen

    @property
    def unfrozen(self) -> tuple[str, ...]:
        return tuple(v for v in self.names if v not in self.frozen)

    def pairing(self, u: Vec, w: Vec) -> Fraction:
        return bilinear(self.form, u, w)

    def eps(self, v: str, w: str) -> Fraction:
        """Exchange entry (e_v, e_w) = <e_v, e_w> d_w."""
        return self.pairing(self.basis_vector(v), self.basis_vector(w)) * self.multiplier(w)

    def eps_hat(self, v: str, w: str) -> Fraction:
        return self.pairing(self.basis_vector(v), self.basis_vector(w))

    def exchange_matrix(self) -> Mat:
        bs = self.basis
        return tuple(
            tuple(self.pairing(bs[i], bs[j]) * self.d[j] for j in range(len(bs))) for i in range(len(bs))
        )

    def check(self) -> None:
        """Assert the quiver axioms."""
        epsm = self.exchange_matrix()
        n = len(self.names)
        for i in range(n):
            for j in range(n):
                x = epsm[i][j]
                both_frozen = self.names[i] in self.frozen and self.names[j] in self.frozen
                if both_frozen:
                    if (2 * x).denominator != 1:
                        raise ValueError(f"eps({self.names[i]},{self.names[j]}) = {x} not in Z/2")
                elif x.denominator != 1:
                    raise ValueError(f"eps({self.names[i]},{self.names[j]}) = {x} not integral")
                # d-skew-symmetry
                assert x * Fraction(1, self.d[j]) == -epsm[j][i] * Fraction(1, self.d[i])

    # -- mutation -------------------------------------------------------------

    def c_sign(self, k: str) -> int:
        """Sign of the c-vector of unfrozen k (sign-coherence; +1 on ties)."""
        ki = self.index(k)
        unfrozen_cols = [i for i, v in enumerate(self.names) if v not in self.frozen]
        coords = [self.cmat[ki][j] for j in unfrozen_cols]
        if any(x > 0 for x in coords) and any(x < 0 for x in coords):
            raise ValueError(f"c-vector of {k!r} is not sign-coherent: {coords}")
        return -1 if any(x < 0 for x in coords) else 1

    def mutate(self, k: str) -> "Quiver":
        """Sign-coherent mutation: e'_i = e_i + [s eps(i,k)]_+ e_k, e'_k = -e_k.

        The sign s is the c-vector sign of k, which makes mutation at the
        same vertex an exact involution on basis vectors.
        """
        if k in self.frozen:
            raise FrozenVertex(f"cannot mutate frozen vertex {k!r}")
        s = self.c_sign(k)
        ki = self.index(k)
        ek = self.basis[ki]
        ck = self.cmat[ki]
        new_basis = []
        new_cmat = []
        for i, ei in enumerate(self.basis):
            if i == ki:
                new_basis.append(tuple(-x for x in ek))
                new_cmat.append(tuple(-x for x in ck))
            else:
                c = self.pairing(ei, ek) * self.d[ki] * s
                if c.denominator != 1:
                    raise ValueError("non-integral mutation coefficient")
                c = max(c, Fraction(0))
                new_basis.append(tuple(a + c * b for a, b in zip(ei, ek)))
                new_cmat.append(tuple(a + c * b for a, b in zip(self.cmat[i], ck)))
        return replace(self, basis=tuple(new_basis), cmat=tuple(new_cmat))

    def mutate_sequence(self, ks: Iterable[str]) -> "Quiver":
        q = self
        for k in ks:
            q = q.mutate(k)
        return q

    def relabel(self, perm: Mapping[str, str]) -> "Quiver":
        """Permute vertex ids: vertex v is renamed perm[v] (data rides along)."""
        new_names = tuple(perm.get(v, v) for v in self.names)
        return replace(self, names=new_names, frozen=frozenset(perm.get(v, v) for v in self.frozen))

    def with_level(self, v: str, level: int | None) -> "Quiver":
        i = self.index(v)
        levels = tuple(level if j == i else x for j, x in enumerate(self.levels))
        return replace(self, levels=levels)

    def restrict(self, keep: Iterable[str]) -> "Quiver":
        """Full subquiver on a subset of vertices (same ambient space)."""
        keep_set = set(keep)
        idx = [i for i, v in enumerate(self.names) if v in keep_set]
        n = len(idx)
        return replace(
            self,
            names=tuple(self.names[i] for i in idx),
            basis=tuple(self.basis[i] for i in idx),
            frozen=frozenset(v for v in self.frozen if v in keep_set),
            d=tuple(self.d[i] for i in idx),
            levels=tuple(self.levels[i] for i in idx),
            display=tuple(self.display[i] for i in idx),
            cmat=tuple(unit(n, i) for i in range(n)),
        )

    def defrost(self, unfreeze: Iterable[str]) -> "Quiver":
        s = set(unfreeze)
        for v in s:
            if v not in self.frozen:
                raise ValueError(f"{v!r} is not frozen")
        n = len(self.names)
        out = replace(self, frozen=frozenset(self.frozen - s), cmat=tuple(unit(n, i) for i in range(n)))
        for v in s:
            for w in out.names:
                if out.eps(v, w).denominator != 1 or out.eps(w, v).denominator != 1:
                    raise HalfIntegralArrow(f"defrosting {v!r} leaves half-integral arrow to {w!r}")
        return out

    def arrows(self) -> list[tuple[str, str, Fraction]]:
        """(source, target, weight) with positive weights, each pair once."""
        out = []
        for i, v in enumerate(self.names):
            for j, w in enumerate(self.names):
                if i < j:
                    x = self.eps(v, w)
                    if x > 0:
                        out.append((v, w, x))
                    elif x < 0:
                        y = self.eps(w, v)
                        if y > 0:
                            out.append((w, v, y))
        return out

    # -- serialization -----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "form": [[fraction_str(x) for x in row] for row in self.form],
            "basis": {v: [fraction_str(x) for x in self.basis[i]] for i, v in enumerate(self.names)},
            "names": list(self.names),
            "frozen": sorted(self.frozen),
            "multipliers": {v: self.d[i] for i, v in enumerate(self.names)},
            "labels": {
                v: {"level": self.levels[i], "display": self.display[i]} for i, v in enumerate(self.names)
            },
        }

    @staticmethod
    def from_json(data: dict) -> "Quiver":
        names = tuple(data["names"])
        form = tuple(tuple(Fraction(x) for x in row) for row in data["form"])
        basis = tuple(vec(Fraction(x) for x in data["basis"][v]) for v in names)
        labels = data.get("labels", {})
        q = Quiver(
            names=names,
            form=form,
            basis=basis,
            frozen=frozenset(data["frozen"]),
            d=tuple(int(data["multipliers"][v]) for v in names),
            levels=tuple(labels.get(v, {}).get("level") for v in names),
            display=tuple(labels.get(v, {}).get("display", v) for v in names),
        )
        return q


# ---------------------------------------------------------------------------
# amalgamation


def amalgamate(
    quivers: Sequence[Quiver],
    gluing: Mapping[tuple[int, str], str],
    levels: Mapping[str, int | None] | None = None,
) -> tuple[Quiver, dict[str, list[tuple[int, str]]]]:
    """Amalgamate quivers along the surjection (piece, vertex) -> new id.

    Vertices not in `gluing` keep their id prefixed by the piece index when
    ids collide.  Returns the amalgamated quiver and the provenance map
    new id -> list of (piece, old id).  Fibers of size > 1 must be frozen
    with equal multipliers; glued vertices are frozen in the result.
    """
    fibers: dict[str, list[tuple[int, str]]] = {}
    for s, q in enumerate(quivers):
        for v in q.names:
            t = gluing.get((s, v), f"p{s}:{v}" if _collides(quivers, s, v, gluing) else v)
            fibers.setdefault(t, []).append((s, v))
    # ambient space = direct sum
    offsets = []
    total = 0
    for q in quivers:
        offsets.append(total)
        total += q.ambient_dim
    form_rows: list[list[Fraction]] = [[Fraction(0)] * total for _ in range(total)]
    for s, q in enumerate(quivers):
        off = offsets[s]
        for i in range(q.ambient_dim):
            for j in range(q.ambient_dim):
                form_rows[off + i][off + j] = q.form[i][j]
    names: list[str] = []
    basis: list[Vec] = []
    frozen: set[str] = set()
    d: list[int] = []
    lvls: list[int | None] = []
    for t, fiber in fibers.items():
        names.append(t)
        v_total = [Fraction(0)] * total
        mults = set()
        fiber_levels = set()
        for s, v in fiber:
            q = quivers[s]
            if len(fiber) > 1 and v not in q.frozen:
                raise NonFrozenCollision(f"vertex {v!r} of piece {s} glued but not frozen")
            bv = q.basis_vector(v)
            off = offsets[s]
            for i, x in enumerate(bv):
                v_total[off + i] += x
            mults.add(q.multiplier(v))
            fiber_levels.add(q.level(v))
        if len(mults) != 1:
            raise MultiplierMismatch(f"multipliers disagree on fiber {t!r}: {sorted(mults)}")
        basis.append(tuple(v_total))
        d.append(mults.pop())
        if any(v in quivers[s].frozen for s, v in fiber):
            frozen.add(t)
        if levels and t in levels:
            lvls.append(levels[t])
        elif len(fiber_levels) == 1:
            lvls.append(fiber_levels.pop())
        else:
            lvls.append(None)
    q_out = Quiver(
        names=tuple(names),
        form=tuple(tuple(r) for r in form_rows),
        basis=tuple(basis),
        frozen=frozenset(frozen),
        d=tuple(d),
        levels=tuple(lvls),
    )
    q_out.check()
    return q_out, fibers


def _collides(quivers, s, v, gluing) -> bool:
    for s2, q2 in enumerate(quivers):
        for v2 in q2.names:
            if (s2, v2) != (s, v) and gluing.get((s2, v2), v2) == v:
                return True
    return False


# ---------------------------------------------------------------------------
# isomorphism


def quiver_isomorphic(
    q1: Quiver,
    q2: Quiver,
    level_preserving: bool = False,
    fixed: Mapping[str, str] | None = None,
) -> dict[str, str] | None:
    """Exact backtracking search for a bijection preserving eps, frozen, d.

    With level_preserving=True, levels must match as well.  `fixed` pins part
    of the bijection.  Deterministic: candidates tried in name order.
    """
    if len(q1.names) != len(q2.names):
        return None
    eps1 = {(v, w): q1.eps(v, w) for v in q1.names for w in q1.names}
    eps2 = {(v, w): q2.eps(v, w) for v in q2.names for w in q2.names}

    def invariant(q: Quiver, eps, v: str):
        row = sorted(eps[(v, w)] for w in q.names)
        col = sorted(eps[(w, v)] for w in q.names)
        return (v in q.frozen, q.multiplier(v), q.level(v) if level_preserving else None, row, col)

    inv1 = {v: invariant(q1, eps1, v) for v in q1.names}
    inv2 = {v: invariant(q2, eps2, v) for v in q2.names}
    if sorted(map(str, inv1.values())) != sorted(map(str, inv2.values())):
        return None

    order = sorted(q1.names, key=lambda v: str(inv1[v]))
    assignment: dict[str, str] = dict(fixed or {})
    used = set(assignment.values())

    def ok(v: str, w: str) -> bool:
        if str(inv1[v]) != str(inv2[w]):
            return False
        for v2, w2 in assignment.items():
            if eps1[(v, v2)] != eps2[(w, w2)] or eps1[(v2, v)] != eps2[(w2, w)]:
                return False
        return True

    def backtrack(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        if v in assignment:
            return backtrack(i + 1)
        for w in q2.names:
            if w in used or not ok(v, w):
                continue
            assignment[v] = w
            used.add(w)
            if backtrack(i + 1):
                return True
            del assignment[v]
            used.remove(w)
        return False

    for v, w in list(assignment.items()):
        if not ok(v, w):
            return None
    return dict(assignment) if backtrack(0) else None


# ---------------------------------------------------------------------------
# tropical points


@dataclass(frozen=True)
class TropicalPoint:
    """Integer coordinates indexed by the unfrozen vertices of a quiver."""

    coords: tuple[tuple[str, int], ...]

    @staticmethod
    def of(data: Mapping[str, int]) -> "TropicalPoint":
        return TropicalPoint(tuple(sorted((k, int(v)) for k, v in data.items() if v)))

    def get(self, v: str) -> int:
        return dict(self.coords).get(v, 0)

    def as_dict(self) -> dict[str, int]:
        return dict(self.coords)


def tropical_mutate(p: TropicalPoint, q: Quiver, k: str) -> TropicalPoint:
    """Tropicalized cluster Poisson mutation at unfrozen k.

    x'_k = -x_k;  x'_i = x_i - eps(i,k) * min(0, -sgn(eps(i,k)) * x_k).
    """
    if k in q.frozen:
        raise FrozenVertex(k)
    x = p.as_dict()
    xk = x.get(k, 0)
    out: dict[str, int] = {}
    for v in q.unfrozen:
        if v == k:
            out[v] = -xk
        else:
            e = q.eps(v, k)
            if e.denominator != 1:
                raise ValueError("non-integral exchange entry at unfrozen pair")
            e = int(e)
            sgn = (e > 0) - (e < 0)
            out[v] = x.get(v, 0) - e * min(0, -sgn * xk)
    return TropicalPoint.of(out)


def frozen_tropical_point(q: Quiver, f: str) -> TropicalPoint:
    """The integral tropical point (eps(i,f))_i over unfrozen i attached to frozen f."""
    if f not in q.frozen:
        raise ValueError(f"{f!r} is not frozen")
    coords = {}
    for v in q.unfrozen:
        e = q.eps(v, f)
        if e.denominator != 1:
            raise ValueError("half-integral entry toward unfrozen vertex")
        coords[v] = int(e)
    return TropicalPoint.of(coords)

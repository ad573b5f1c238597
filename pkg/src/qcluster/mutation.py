"""Classical and quantum cluster mutation machinery.

Scripts are lists of steps: ("mut", vertex), ("perm", {old: new}), or
("mono", {target: {source: exponent}}).  Signatures decompose a script into
its tropical part (tracked through c-vectors) and an ordered list of
quantum dilogarithm factors; identity checks truncate the dilog product at
a configurable order.  TrackedSeed carries quantum cluster variables as
exact Laurent elements of a fixed torus algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from qcluster.linalg import Mat, Vec, identity, inverse, mat, unit, vec, vecmat
from qcluster.quiver import Quiver, TropicalPoint, tropical_mutate
from qcluster.qtorus import (
    QS_ONE,
    NotDivisible,
    QScalar,
    TorusAlgebra,
    TorusElement,
    TorusSeries,
    dilog_series,
)

__all__ = [
    "Step",
    "mut",
    "perm",
    "mono",
    "PoleEncountered",
    "SignCoherenceViolated",
    "DivisionFailed",
    "NotStandard",
    "classical_x_transform",
    "tropical_transform",
    "Signature",
    "sequence_signature",
    "is_identity_sequence",
    "TrackedSeed",
    "standard_monomial_check",
    "quantum_lift_vector",
    "transport_monomial",
    "compatible_pair",
    "f_polynomial_and_g_vector",
]

Step = tuple  # ("mut", v) | ("perm", {..}) | ("mono", {..})


def mut(v: str) -> Step:
    return ("mut", v)


def perm(mapping: Mapping[str, str]) -> Step:
    return ("perm", dict(mapping))


def mono(mapping: Mapping[str, Mapping[str, int]]) -> Step:
    return ("mono", {t: dict(src) for t, src in mapping.items()})


class PoleEncountered(ArithmeticError):
    pass


class SignCoherenceViolated(RuntimeError):
    pass


class DivisionFailed(ArithmeticError):
    pass


class NotStandard(ValueError):
    pass


def apply_step_to_quiver(q: Quiver, step: Step) -> Quiver:
    kind = step[0]
    if kind == "mut":
        return q.mutate(step[1])
    if kind == "perm":
        return q.relabel(step[1])
    if kind == "mono":
        return q  # monomial steps do not move the quiver basis
    raise ValueError(f"unknown step {step!r}")


def run_script(q: Quiver, script: Sequence[Step]) -> Quiver:
    for step in script:
        q = apply_step_to_quiver(q, step)
    return q


def script_of_mutations(vertices: Iterable[str]) -> list[Step]:
    return [mut(v) for v in vertices]


def inverse_script(script: Sequence[Step]) -> list[Step]:
    out: list[Step] = []
    for step in reversed(script):
        if step[0] == "mut":
            out.append(step)
        elif step[0] == "perm":
            out.append(perm({w: v for v, w in step[1].items()}))
        else:
            raise ValueError("cannot invert a monomial step without its inverse data")
    return out


# ---------------------------------------------------------------------------
# classical transport of points


def classical_x_transform(
    q: Quiver, script: Sequence[Step], point: Mapping[str, Fraction]
) -> dict[str, Fraction]:
    """Exact rational image of a point under the cluster transformation."""
    pt = {v: Fraction(x) for v, x in point.items()}
    cur = q
    for step in script:
        kind = step[0]
        if kind == "mut":
            k = step[1]
            xk = pt[k]
            if xk == 0:
                raise PoleEncountered(f"X_{k} = 0")
            new_pt: dict[str, Fraction] = {}
            for v in cur.names:
                if v == k:
                    new_pt[v] = 1 / xk
                    continue
                e = cur.eps(v, k)
                if e == 0:
                    new_pt[v] = pt[v]
                    continue
                if e.denominator != 1:
                    raise PoleEncountered(f"half-integral exponent at ({v},{k})")
                base = 1 + (xk if e < 0 else 1 / xk)
                if base == 0:
                    raise PoleEncountered(f"1 + X_{k}^{{+-1}} = 0")
                new_pt[v] = pt[v] * base ** int(-e)
            pt = new_pt
            cur = cur.mutate(k)
        elif kind == "perm":
            pt = {step[1].get(v, v): x for v, x in pt.items()}
            cur = cur.relabel(step[1])
        elif kind == "mono":
            new_pt = dict(pt)
            for target, srcs in step[1].items():
                val = Fraction(1)
                for s, e in srcs.items():
                    val *= pt[s] ** int(e)
                new_pt[target] = val
            pt = new_pt
        else:
            raise ValueError(f"unknown step {step!r}")
    return pt


def tropical_transform(
    q: Quiver, script: Sequence[Step], p: TropicalPoint
) -> TropicalPoint:
    cur = q
    for step in script:
        if step[0] == "mut":
            p = tropical_mutate(p, cur, step[1])
            cur = cur.mutate(step[1])
        elif step[0] == "perm":
            p = TropicalPoint.of({step[1].get(v, v): x for v, x in p.as_dict().items()})
            cur = cur.relabel(step[1])
        else:
            raise ValueError("tropical transport supports mut/perm steps only")
    return p


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class Signature:
    """Tropical part + ordered dilog factors of a mutation script.

    factors: (c_vector in initial-seed coordinates, sign, multiplier d)
    basis_returns: True iff the final basis equals the initial one vertexwise
    """

    initial: Quiver
    final: Quiver
    factors: tuple[tuple[Vec, int, int], ...]
    basis_returns: bool

    def dilog_product(self, order: int) -> TorusSeries:
        """Ordered product of Psi_{q_d}(X_{s c})^s over the factors, truncated."""
        n = len(self.initial.names)
        gram = tuple(
            tuple(self.initial.pairing(self.initial.basis[i], self.initial.basis[j]) for j in range(n))
            for i in range(n)
        )
        alg = TorusAlgebra(n, gram, 2, "signature")
        unfrozen_idx = [i for i, v in enumerate(self.initial.names) if v not in self.initial.frozen]

        def degree(v: Vec) -> int:
            total = Fraction(0)
            for i in unfrozen_idx:
                total += abs(v[i])
            return int(total) if total.denominator == 1 else int(total) + 1

        out = TorusSeries.one(alg, order, degree)
        for cvec, sign, d in self.factors:
            arg = alg.monomial(tuple(sign * x for x in cvec))
            out = out * dilog_series(arg, order, d=d, degree=degree, power=sign)
        return out

    def is_identity(self, order: int = 8) -> bool:
        return self.basis_returns and self.dilog_product(order).is_one()


def sequence_signature(q: Quiver, script: Sequence[Step]) -> Signature:
    cur = q
    factors: list[tuple[Vec, int, int]] = []
    for step in script:
        if step[0] == "mut":
            k = step[1]
            try:
                s = cur.c_sign(k)
            except ValueError as exc:
                raise SignCoherenceViolated(str(exc)) from exc
            ki = cur.index(k)
            factors.append((cur.cmat[ki], s, cur.multiplier(k)))
            cur = cur.mutate(k)
        elif step[0] == "perm":
            cur = cur.relabel(step[1])
        else:
            raise ValueError("signatures support mut/perm steps only")
    returns = set(cur.names) == set(q.names) and all(
        cur.basis_vector(v) == q.basis_vector(v) for v in q.names
    )
    return Signature(q, cur, tuple(factors), returns)


def is_identity_sequence(q: Quiver, script: Sequence[Step], order: int = 8) -> bool:
    return sequence_signature(q, script).is_identity(order)


# ---------------------------------------------------------------------------
# tracked quantum seeds


@dataclass
class TrackedSeed:
    """Quantum cluster seed: quiver + compatible pair + tracked A-variables.

    alg:   fixed torus algebra (the initial quantum torus)
    quiver: current quiver (mutated along)
    evec:  current exchange-lattice vectors per vertex, in alg coordinates
    fmat:  rows = the full quasi-dual basis F in alg coordinates; the first
           len(names) rows are the per-vertex f-vectors, later rows are
           frozen complements (never mutated)
    avars: tracked quantum cluster variables per vertex (Laurent, exact)
    """

    alg: TorusAlgebra
    quiver: Quiver
    evec: dict[str, Vec]
    fmat: list[Vec]
    avars: dict[str, TorusElement]
    history: list[Step] = field(default_factory=list)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def doubled(q: Quiver) -> "TrackedSeed":
        """Track in the doubled lattice  span(e) + span(e'),  (e'_i, e_j) = d_j^{-1} delta."""
        n = len(q.names)
        gram = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
        for i in range(n):
            for j in range(n):
                gram[i][j] = q.pairing(q.basis[i], q.basis[j])
        for i in range(n):
            for j in range(n):
                if i == j:
                    gram[n + i][j] = Fraction(1, q.d[j])
                    gram[j][n + i] = -Fraction(1, q.d[j])
        lcm = 1
        for x in q.d:
            lcm = lcm * x // _gcd(lcm, x)
        alg = TorusAlgebra(2 * n, tuple(tuple(r) for r in gram), 2 * lcm, "doubled")
        eps0 = q.exchange_matrix()
        evec = {v: unit(2 * n, i) for i, v in enumerate(q.names)}
        fmat: list[Vec] = [unit(2 * n, n + i) for i in range(n)]
        for k in range(n):
            # complement f_{n+k} = e_k - sum_l eps_kl e'_l
            row = [Fraction(0)] * (2 * n)
            row[k] = Fraction(1)
            for l in range(n):
                row[n + l] -= eps0[k][l]
            fmat.append(tuple(row))
        avars = {v: alg.monomial(fmat[i]) for i, v in enumerate(q.names)}
        seed = TrackedSeed(alg, q, evec, fmat, avars)
        seed.check_compatible()
        return seed

    @staticmethod
    def with_f_basis(q: Quiver, fmat: Sequence[Vec], D: int = 2) -> "TrackedSeed":
        """Track in the quiver's own lattice with an explicit square F-basis.

        Coordinates are taken over the initial basis of q (so evec = units)
        and the form is the initial Gram matrix of the quiver.
        """
        n = len(q.names)
        gram = tuple(tuple(q.pairing(q.basis[i], q.basis[j]) for j in range(n)) for i in range(n))
        alg = TorusAlgebra(n, gram, D, "tracked")
        evec = {v: unit(n, i) for i, v in enumerate(q.names)}
        rows = [vec(r) for r in fmat]
        avars = {v: alg.monomial(rows[i]) for i, v in enumerate(q.names)}
        seed = TrackedSeed(alg, q, evec, rows, avars)
        seed.check_compatible()
        return seed

    # -- invariants --------------------------------------------------------

    def check_compatible(self) -> None:
        """(f_i, e_j) = d_j^{-1} delta_ij for unfrozen j."""
        for j, w in enumerate(self.quiver.names):
            if w in self.quiver.frozen:
                continue
            ew = self.evec[w]
            for i, f in enumerate(self.fmat):
                want = Fraction(1, self.quiver.multiplier(w)) if i == j else Fraction(0)
                got = self.alg.pairing(f, ew)
                assert got == want, (i, w, got, want)

    def p_matrix(self) -> Mat:
        """p with e_v = sum_j p_vj f_j, rows indexed by vertices."""
        finv = inverse(mat(self.fmat))
        return tuple(vecmat(self.evec[v], finv) for v in self.quiver.names)

    def qcomm(self, i: int, j: int) -> Fraction:
        """lambda with A_i A_j = q^lambda A_j A_i, from the current f-pairings."""
        return 2 * self.alg.pairing(self.fmat[i], self.fmat[j])

    # -- mutation ------------------------------------------------------------

    def mutate(self, k: str) -> "TrackedSeed":
        q = self.quiver
        if q.is_frozen(k):
            raise ValueError(f"cannot mutate frozen vertex {k!r}")
        s = q.c_sign(k)
        ki = q.index(k)
        names = q.names
        p = self.p_matrix()
        pk = p[ki]
        for x in pk:
            if x.denominator != 1:
                raise DivisionFailed(f"p-row of {k!r} is not integral: {pk}")

        # the two exchange products, Weyl-normalized including a virtual A_k^{-1}
        def product(sign: int) -> TorusElement:
            factors: list[tuple[int, int]] = []  # (f-index, exponent)
            for j in range(len(self.fmat)):
                a = int(max(sign * s * pk[j], 0)) if j != ki else 0
                if a:
                    factors.append((j, a))
            lam_k = [self.qcomm(ki, j) for j, _ in factors]
            # c = 1/2 sum_t a_t lambda_{k,t} - 1/2 sum_{s<t} a_s a_t lambda_{s,t}
            c = Fraction(0)
            for t, (j, a) in enumerate(factors):
                c += Fraction(a) * lam_k[t] / 2
            for t1 in range(len(factors)):
                for t2 in range(t1 + 1, len(factors)):
                    j1, a1 = factors[t1]
                    j2, a2 = factors[t2]
                    c -= Fraction(a1 * a2) * self.qcomm(j1, j2) / 2
            out = self.alg.scalar_element(QScalar.q_power(c))
            for j, a in factors:
                base = self.avars[names[j]] if j < len(names) else self.alg.monomial(self.fmat[j])
                for _ in range(a):
                    out = out * base
            return out

        total = product(+1) + product(-1)
        try:
            new_ak = total.left_divide_exact(self.avars[k])
        except NotDivisible as exc:
            raise DivisionFailed(f"quantum exchange at {k!r} is not Laurent") from exc

        # lattice updates (mu^s on e, matching rule on f)
        ek = self.evec[k]
        new_evec = {}
        for v in names:
            if v == k:
                new_evec[v] = tuple(-x for x in ek)
            else:
                c = max(s * q.eps(v, k), Fraction(0))
                new_evec[v] = tuple(a + c * b for a, b in zip(self.evec[v], ek))
        new_fmat = list(self.fmat)
        row = tuple(-x for x in self.fmat[ki])
        for j in range(len(self.fmat)):
            a = max(int(-s * pk[j]), 0) if j != ki else 0
            if a:
                row = tuple(x + a * y for x, y in zip(row, self.fmat[j]))
        new_fmat[ki] = row
        new_avars = dict(self.avars)
        new_avars[k] = new_ak
        seed = TrackedSeed(
            self.alg,
            q.mutate(k),
            new_evec,
            new_fmat,
            new_avars,
            self.history + [mut(k)],
        )
        seed.check_compatible()
        return seed

    def mutate_sequence(self, ks: Iterable[str]) -> "TrackedSeed":
        seed = self
        for k in ks:
            seed = seed.mutate(k)
        return seed

    def apply(self, script: Sequence[Step]) -> "TrackedSeed":
        seed = self
        for step in script:
            if step[0] == "mut":
                seed = seed.mutate(step[1])
            elif step[0] == "perm":
                m = step[1]
                names = seed.quiver.names
                idx = {v: i for i, v in enumerate(names)}
                new_quiver = seed.quiver.relabel(m)
                fmat = list(seed.fmat)
                # f rows ride along with their vertices
                for v, w in m.items():
                    fmat[idx[v]] = seed.fmat[idx[v]]
                seed = TrackedSeed(
                    seed.alg,
                    new_quiver,
                    {m.get(v, v): e for v, e in seed.evec.items()},
                    fmat,
                    {m.get(v, v): a for v, a in seed.avars.items()},
                    seed.history + [step],
                )
            else:
                raise ValueError("tracked seeds support mut/perm steps")
        return seed

    def classical_avars(self) -> dict[str, dict[Vec, Fraction]]:
        return {v: a.q1_terms() for v, a in self.avars.items()}


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# standard monomials and the quantum lift


def standard_monomial_check(q: Quiver, v: Vec) -> bool:
    """True iff <v, e_i> >= 0 for every unfrozen basis vector."""
    return all(q.pairing(vec(v), q.basis_vector(w)) >= 0 for w in q.unfrozen)


def quantum_lift_vector(alg: TorusAlgebra, q: Quiver, v: Vec) -> TorusElement:
    if not standard_monomial_check(q, v):
        raise NotStandard(f"{v} pairs negatively with an unfrozen direction")
    return alg.monomial(v)


def eval_chart_monomial(q: Quiver, v: Vec, point: Mapping[str, Fraction]) -> Fraction:
    """Evaluate x_v at a chart point, expanding v over the chart basis."""
    from qcluster.linalg import solve_in_span

    coeffs = solve_in_span([q.basis_vector(w) for w in q.names], vec(v))
    out = Fraction(1)
    for w, c in zip(q.names, coeffs):
        if c.denominator != 1:
            raise ValueError("vector not in the chart lattice")
        out *= Fraction(point[w]) ** int(c)
    return out


def transport_monomial(
    q: Quiver,
    script: Sequence[Step],
    v: Vec,
    rng,
    n_check: int = 10,
) -> dict[str, int]:
    """Pull back the end-chart monomial x_v along the script, as a start-chart monomial.

    Uses exact classical evaluation: probes each start coordinate to read off
    the exponent, then verifies on random rational points.  Raises
    NotStandard if the image is not a Laurent monomial.
    """
    end_quiver = run_script(q, script)

    def pulled_back(point: Mapping[str, Fraction]) -> Fraction:
        image = classical_x_transform(q, script, point)
        return eval_chart_monomial(end_quiver, v, image)

    base = {w: Fraction(1) for w in q.names}
    c0 = pulled_back(base)
    exps: dict[str, int] = {}
    for w in q.names:
        p2 = dict(base)
        p2[w] = Fraction(2)
        ratio = pulled_back(p2) / c0
        e = 0
        r = ratio
        while r != 1 and r.denominator == 1 and r % 2 == 0:
            r /= 2
            e += 1
        while r != 1 and r.numerator == 1 and r.denominator % 2 == 0:
            r *= 2
            e -= 1
        if r != 1:
            raise NotStandard(f"image is not monomial in X_{w}: ratio {ratio}")
        exps[w] = e
    if c0 != 1:
        raise NotStandard(f"image has nontrivial constant {c0}")
    for _ in range(n_check):
        pt = {w: Fraction(rng.randint(1, 50), rng.randint(1, 50)) for w in q.names}
        lhs = pulled_back(pt)
        rhs = Fraction(1)
        for w, e in exps.items():
            rhs *= pt[w] ** e
        if lhs != rhs:
            raise NotStandard("image is not a Laurent monomial")
    return {w: e for w, e in exps.items() if e}


# ---------------------------------------------------------------------------
# compatible pairs and F-polynomials


def compatible_pair(seed: TrackedSeed) -> dict:
    """Berenstein-Zelevinsky pair (B~, Pi) from the seed's p-matrix.

    Requires a square invertible p.  Returns the matrices, the scaling d,
    and a validity report.
    """
    q = seed.quiver
    p = seed.p_matrix()
    n = len(q.names)
    if len(seed.fmat) != n:
        raise ValueError("compatible_pair needs a square F-basis")
    try:
        pinv = inverse(p)
    except ValueError as exc:
        raise ValueError("SingularP: p-matrix is not invertible") from exc
    gram = tuple(tuple(seed.alg.pairing(seed.evec[a], seed.evec[b]) for b in q.names) for a in q.names)
    from qcluster.linalg import matmul, transpose

    pi0 = matmul(matmul(pinv, gram), transpose(pinv))
    denom = 1
    for row in pi0:
        for x in row:
            denom = denom * x.denominator // _gcd(denom, x.denominator)
    d = -denom
    pi = tuple(tuple(d * x for x in row) for row in pi0)
    unfrozen = [i for i, v in enumerate(q.names) if v not in q.frozen]
    btilde = tuple(tuple(p[j][i] for j in unfrozen) for i in range(n))  # n x m
    # B~^t Pi should be (D', 0) with D' = diag(-d / d_i) on unfrozen columns
    bt_pi = matmul(tuple(tuple(p[j][i] for i in range(n)) for j in unfrozen), pi)
    ok_skew = all(pi[i][j] == -pi[j][i] for i in range(n) for j in range(n))
    ok_int = all(x.denominator == 1 for row in pi for x in row)
    ok_diag = True
    for r, j in enumerate(unfrozen):
        for i in range(n):
            want = Fraction(-d, q.d[j]) if i == j else Fraction(0)
            if bt_pi[r][i] != want:
                ok_diag = False
    return {
        "p": p,
        "pi": pi,
        "d": d,
        "btilde": btilde,
        "bt_pi": bt_pi,
        "skew": ok_skew,
        "integral": ok_int,
        "diagonal": ok_diag,
        "valid": ok_skew and ok_int and ok_diag,
    }


def f_polynomial_and_g_vector(seed: TrackedSeed, v: str) -> tuple[dict[tuple[int, ...], Fraction], Vec]:
    """F-polynomial and g-vector of a tracked variable of a doubled seed.

    Terms of the q=1 specialization are written  g + sum n_j E_j  with the
    E_j the initial exchange directions; the common f-part is the g-vector
    and the exponents n_j are the F-polynomial monomials.
    """
    n = len(seed.quiver.names)
    terms = seed.avars[v].q1_terms()
    g: Vec | None = None
    fpoly: dict[tuple[int, ...], Fraction] = {}
    for w, c in terms.items():
        e_part = w[:n]
        f_part = w[n:]
        if any(x.denominator != 1 or x < 0 for x in e_part):
            raise ValueError(f"term {w} is not in the positive exchange cone")
        if g is None:
            g = f_part
        elif g != f_part:
            raise ValueError("terms do not share a common g-part")
        key = tuple(int(x) for x in e_part)
        fpoly[key] = fpoly.get(key, Fraction(0)) + c
    assert g is not None
    return fpoly, tuple(list(g))

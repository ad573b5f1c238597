"""Exact quantum torus arithmetic.

Scalars are Laurent polynomials in a formal root q^(1/D) with rational
coefficients (`QScalar`).  Torus elements are finite sums of lattice
monomials X_v with QScalar coefficients, multiplying by

    X_v X_w = q^<v,w> X_{v+w}

for the skew form <,> of the ambient algebra.  Series with rational-function
coefficients (`QRat`, `TorusSeries`) support the quantum dilogarithm.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from qcluster.linalg import Mat, Vec, bilinear, fraction_str, is_skew, vec

__all__ = [
    "QScalar",
    "QRat",
    "TorusAlgebra",
    "TorusElement",
    "TorusSeries",
    "AlgebraMismatch",
    "NotDivisible",
    "NotCentral",
    "dilog_series",
    "pentagon_check",
]


class AlgebraMismatch(ValueError):
    pass


class NotDivisible(ArithmeticError):
    def __init__(self, msg: str, remainder=None):
        super().__init__(msg)
        self.remainder = remainder


class NotCentral(ValueError):
    pass


# ---------------------------------------------------------------------------
# scalars


class QScalar:
    """Laurent polynomial in q^(1/D): sparse map exponent -> coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Fraction, Fraction] | None = None):
        clean: dict[Fraction, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if c:
                    e = Fraction(e)
                    clean[e] = clean.get(e, Fraction(0)) + Fraction(c)
        self.terms = {e: c for e, c in clean.items() if c}

    # -- constructors --------------------------------------------------
    @staticmethod
    def of(c) -> "QScalar":
        return QScalar({Fraction(0): Fraction(c)})

    @staticmethod
    def q_power(e) -> "QScalar":
        return QScalar({Fraction(e): Fraction(1)})

    @staticmethod
    def zero() -> "QScalar":
        return QScalar()

    # -- predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {Fraction(0): Fraction(1)}

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, QScalar) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other: "QScalar") -> "QScalar":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return QScalar(out)

    def __sub__(self, other: "QScalar") -> "QScalar":
        return self + (-other)

    def __neg__(self) -> "QScalar":
        return QScalar({e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "QScalar") -> "QScalar":
        out: dict[Fraction, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return QScalar(out)

    def scale(self, c) -> "QScalar":
        c = Fraction(c)
        return QScalar({e: c * v for e, v in self.terms.items()})

    def shift(self, e) -> "QScalar":
        """Multiply by q^e."""
        e = Fraction(e)
        return QScalar({ex + e: c for ex, c in self.terms.items()})

    def bar(self) -> "QScalar":
        """The involution q -> q^{-1}."""
        return QScalar({-e: c for e, c in self.terms.items()})

    def divide_exact(self, other: "QScalar") -> "QScalar":
        """Exact Laurent division; raises NotDivisible on failure."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        if self.is_zero():
            return QScalar()
        # scale exponents to integers
        dens = [e.denominator for e in self.terms] + [e.denominator for e in other.terms]
        scale = 1
        for d in dens:
            scale = scale * d // _gcd(scale, d)
        a = {int(e * scale): c for e, c in self.terms.items()}
        b = {int(e * scale): c for e, c in other.terms.items()}
        alo, ahi = min(a), max(a)
        blo, bhi = min(b), max(b)
        # polynomial long division from the top
        quot: dict[int, Fraction] = {}
        rem = dict(a)
        bl = bhi
        blc = b[bhi]
        while rem:
            rhi = max(rem)
            qe = rhi - bl
            if qe < alo - bhi:  # exact quotient exponents are >= alo - blo
                raise NotDivisible("scalar division does not terminate", remainder=rem)
            qc = rem[rhi] / blc
            quot[qe] = quot.get(qe, Fraction(0)) + qc
            for be, bc in b.items():
                e = be + qe
                nc = rem.get(e, Fraction(0)) - qc * bc
                if nc:
                    rem[e] = nc
                else:
                    rem.pop(e, None)
            if len(quot) > 4 * (len(a) + len(b) + abs(ahi - alo) + abs(bhi - blo)) + 64:
                raise NotDivisible("scalar division quotient too large", remainder=rem)
        return QScalar({Fraction(e, scale): c for e, c in quot.items()})

    def eval_q1(self) -> Fraction:
        return sum(self.terms.values(), Fraction(0))

    def eval_at(self, q: Fraction) -> Fraction:
        out = Fraction(0)
        for e, c in self.terms.items():
            if e.denominator != 1:
                raise ValueError("cannot evaluate fractional q-power at a rational q")
            out += c * q ** int(e)
        return out

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    # -- printing --------------------------------------------------------
    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms):
            c = self.terms[e]
            if e == 0:
                bits.append(fraction_str(c))
            else:
                cs = "" if c == 1 else ("-" if c == -1 else fraction_str(c) + "*")
                bits.append(f"{cs}q^({fraction_str(e)})")
        return " + ".join(bits).replace("+ -", "- ")


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


QS_ONE = QScalar.of(1)
QS_ZERO = QScalar()


def q_int(n: int, d=1) -> QScalar:
    """[n]_q in base q^(1/d): (q_d^n - q_d^-n)/(q_d - q_d^-1)."""
    step = Fraction(1, d)
    return QScalar({step * (n - 1 - 2 * k): Fraction(1) for k in range(n)})


def q_factorial(n: int, d=1) -> QScalar:
    out = QS_ONE
    for s in range(1, n + 1):
        out = out * q_int(s, d)
    return out


def q_binomial(n: int, k: int, d=1) -> QScalar:
    num = QS_ONE
    for s in range(n - k + 1, n + 1):
        num = num * q_int(s, d)
    return num.divide_exact(q_factorial(k, d))


# ---------------------------------------------------------------------------
# the torus algebra


@dataclass(frozen=True)
class TorusAlgebra:
    """Lattice rank, skew form and a denominator bound D for q-exponents."""

    rank: int
    form: Mat
    D: int = 2
    name: str = ""

    def __post_init__(self):
        assert len(self.form) == self.rank and all(len(r) == self.rank for r in self.form)
        assert is_skew(self.form), "torus algebra form must be skew-symmetric"

    def pairing(self, v: Vec, w: Vec) -> Fraction:
        return bilinear(self.form, v, w)

    def zero(self) -> "TorusElement":
        return TorusElement(self, {})

    def one(self) -> "TorusElement":
        return self.monomial(tuple(Fraction(0) for _ in range(self.rank)))

    def monomial(self, v: Iterable, coeff: QScalar | None = None) -> "TorusElement":
        vv = vec(v)
        assert len(vv) == self.rank
        return TorusElement(self, {vv: coeff if coeff is not None else QS_ONE})

    def unit(self, i: int, power=1) -> "TorusElement":
        return self.monomial(tuple(Fraction(power if j == i else 0) for j in range(self.rank)))

    def element(self, terms: Mapping[Vec, QScalar]) -> "TorusElement":
        return TorusElement(self, dict(terms))

    def scalar_element(self, c: QScalar) -> "TorusElement":
        return TorusElement(self, {tuple(Fraction(0) for _ in range(self.rank)): c})


def _lex_key(v: Vec):
    return tuple(v)


class TorusElement:
    """Finite sum of lattice monomials with QScalar coefficients."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: TorusAlgebra, terms: Mapping[Vec, QScalar]):
        self.algebra = algebra
        self.terms = {vec(v): c for v, c in terms.items() if not c.is_zero()}

    # -- helpers ---------------------------------------------------------
    def _require_same(self, other: "TorusElement") -> None:
        if self.algebra is not other.algebra and self.algebra != other.algebra:
            raise AlgebraMismatch("elements of different torus algebras")

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, TorusElement) and self.algebra == other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash((self.algebra, frozenset((v, c) for v, c in self.terms.items())))

    def n_terms(self) -> int:
        return len(self.terms)

    def monomial_vector(self) -> Vec:
        """The exponent of a single-term element."""
        if len(self.terms) != 1:
            raise ValueError("not a monomial")
        return next(iter(self.terms))

    # -- ring operations --------------------------------------------------
    def __add__(self, other: "TorusElement") -> "TorusElement":
        self._require_same(other)
        out = dict(self.terms)
        for v, c in other.terms.items():
            out[v] = out.get(v, QS_ZERO) + c
        return TorusElement(self.algebra, out)

    def __sub__(self, other: "TorusElement") -> "TorusElement":
        return self + (-other)

    def __neg__(self) -> "TorusElement":
        return TorusElement(self.algebra, {v: -c for v, c in self.terms.items()})

    def __mul__(self, other: "TorusElement") -> "TorusElement":
        self._require_same(other)
        alg = self.algebra
        out: dict[Vec, QScalar] = {}
        for v, cv in self.terms.items():
            for w, cw in other.terms.items():
                u = tuple(a + b for a, b in zip(v, w))
                c = (cv * cw).shift(alg.pairing(v, w))
                out[u] = out.get(u, QS_ZERO) + c
        return TorusElement(alg, out)

    def scale(self, c: QScalar) -> "TorusElement":
        return TorusElement(self.algebra, {v: cv * c for v, cv in self.terms.items()})

    def __pow__(self, n: int) -> "TorusElement":
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials are invertible")
            v = self.monomial_vector()
            c = self.terms[v]
            inv = TorusElement(self.algebra, {tuple(-x for x in v): QS_ONE.divide_exact(c)})
            return inv ** (-n)
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    def bar(self) -> "TorusElement":
        """The *_R involution: q -> q^{-1}, X_v -> X_v (antiautomorphism)."""
        return TorusElement(self.algebra, {v: c.bar() for v, c in self.terms.items()})

    def commutator(self, other: "TorusElement") -> "TorusElement":
        return self * other - other * self

    def divide_scalar(self, s: QScalar) -> "TorusElement":
        return TorusElement(self.algebra, {v: c.divide_exact(s) for v, c in self.terms.items()})

    # -- leading terms and division ----------------------------------------
    def leading(self) -> tuple[Vec, QScalar]:
        v = max(self.terms, key=_lex_key)
        return v, self.terms[v]

    def trailing(self) -> tuple[Vec, QScalar]:
        v = min(self.terms, key=_lex_key)
        return v, self.terms[v]

    def left_divide_exact(self, divisor: "TorusElement") -> "TorusElement":
        """Return r with self = divisor * r; NotDivisible (with witness) otherwise."""
        self._require_same(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero element")
        alg = self.algebra
        rem = self
        quot = alg.zero()
        dv, dc = divisor.leading()
        max_steps = 16 * (len(self.terms) + len(divisor.terms)) + 256
        steps = 0
        while not rem.is_zero():
            steps += 1
            if steps > max_steps:
                raise NotDivisible("left division exceeded step bound", remainder=rem)
            rv, rc = rem.leading()
            tv = tuple(a - b for a, b in zip(rv, dv))
            try:
                tc = rc.shift(-alg.pairing(dv, tv)).divide_exact(dc)
            except NotDivisible as exc:
                raise NotDivisible("leading coefficient not divisible", remainder=rem) from exc
            t = TorusElement(alg, {tv: tc})
            quot = quot + t
            rem = rem - divisor * t
        return quot

    def right_divide_exact(self, divisor: "TorusElement") -> "TorusElement":
        """Return r with self = r * divisor."""
        self._require_same(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero element")
        alg = self.algebra
        rem = self
        quot = alg.zero()
        dv, dc = divisor.leading()
        max_steps = 16 * (len(self.terms) + len(divisor.terms)) + 256
        steps = 0
        while not rem.is_zero():
            steps += 1
            if steps > max_steps:
                raise NotDivisible("right division exceeded step bound", remainder=rem)
            rv, rc = rem.leading()
            tv = tuple(a - b for a, b in zip(rv, dv))
            try:
                tc = rc.shift(-alg.pairing(tv, dv)).divide_exact(dc)
            except NotDivisible as exc:
                raise NotDivisible("leading coefficient not divisible", remainder=rem) from exc
            t = TorusElement(alg, {tv: tc})
            quot = quot + t
            rem = rem - t * divisor
        return quot

    # -- specialization -----------------------------------------------------
    def eval_classical(self, point: Vec) -> Fraction:
        """q = 1 evaluation at a point with nonzero rational coordinates."""
        out = Fraction(0)
        for v, c in self.terms.items():
            m = Fraction(1)
            for x, p in zip(v, point):
                if x.denominator != 1:
                    raise ValueError("fractional exponent; cannot evaluate classically")
                m *= Fraction(p) ** int(x)
            out += c.eval_q1() * m
        return out

    def q1_terms(self) -> dict[Vec, Fraction]:
        out: dict[Vec, Fraction] = {}
        for v, c in self.terms.items():
            x = c.eval_q1()
            if x:
                out[v] = x
        return out

    # -- printing -------------------------------------------------------------
    def __repr__(self) -> str:
        return self.to_text()

    def to_text(self) -> str:
        """Textual format: sum of terms "c*q^(p)*X[v1,...,vn]"."""
        if not self.terms:
            return "0"
        bits = []
        for v in sorted(self.terms, key=_lex_key, reverse=True):
            c = self.terms[v]
            parts = []
            for e in sorted(c.terms):
                coeff = c.terms[e]
                seg = fraction_str(coeff)
                if e != 0:
                    seg += f"*q^({fraction_str(e)})"
                parts.append(seg)
            cstr = "+".join(parts)
            if len(parts) > 1:
                cstr = "(" + cstr + ")"
            vstr = ",".join(fraction_str(x) for x in v)
            bits.append(f"{cstr}*X[{vstr}]")
        return " + ".join(bits)

    @staticmethod
    def from_text(alg: TorusAlgebra, text: str) -> "TorusElement":
        text = text.strip()
        if text == "0":
            return alg.zero()
        out = alg.zero()
        for chunk in re.split(r"\s\+\s", text):
            m = re.fullmatch(r"(.*)\*X\[(.*)\]", chunk.strip())
            if not m:
                raise ValueError(f"bad term {chunk!r}")
            cstr, vstr = m.group(1), m.group(2)
            v = vec(Fraction(x) for x in vstr.split(","))
            cstr = cstr.strip()
            if cstr.startswith("(") and cstr.endswith(")"):
                cstr = cstr[1:-1]
            terms: dict[Fraction, Fraction] = {}
            for seg in cstr.split("+"):
                mm = re.fullmatch(r"\s*(-?\d+(?:/\d+)?)(?:\*q\^\((-?\d+(?:/\d+)?)\))?\s*", seg)
                if not mm:
                    raise ValueError(f"bad coefficient {seg!r}")
                coeff = Fraction(mm.group(1))
                e = Fraction(mm.group(2)) if mm.group(2) else Fraction(0)
                terms[e] = terms.get(e, Fraction(0)) + coeff
            out = out + TorusElement(alg, {v: QScalar(terms)})
        return out


# ---------------------------------------------------------------------------
# central quotients


@dataclass(frozen=True)
class CentralQuotient:
    """Quotient of a torus algebra by a central lattice vector X_z = 1."""

    algebra: TorusAlgebra
    z: Vec
    pivot: int

    @staticmethod
    def of(alg: TorusAlgebra, z: Iterable) -> "CentralQuotient":
        zz = vec(z)
        unit_dirs = [tuple(Fraction(1 if j == i else 0) for j in range(alg.rank)) for i in range(alg.rank)]
        if any(alg.pairing(zz, u) != 0 for u in unit_dirs):
            raise NotCentral(f"{zz} is not in the kernel of the form")
        pivots = [i for i, x in enumerate(zz) if abs(x) == 1]
        if not pivots:
            pivots = [i for i, x in enumerate(zz) if x != 0]
        if not pivots:
            raise ValueError("zero vector")
        return CentralQuotient(alg, zz, pivots[0])

    def reduce_vector(self, v: Vec) -> Vec:
        k = Fraction(v[self.pivot]) / self.z[self.pivot]
        return tuple(a - k * b for a, b in zip(v, self.z))

    def reduce(self, el: TorusElement) -> TorusElement:
        out: dict[Vec, QScalar] = {}
        for v, c in el.terms.items():
            u = self.reduce_vector(v)
            out[u] = out.get(u, QS_ZERO) + c
        return TorusElement(self.algebra, out)

    def equal(self, a: TorusElement, b: TorusElement) -> bool:
        return self.reduce(a) == self.reduce(b)


# ---------------------------------------------------------------------------
# series with rational-function coefficients


class QRat:
    """Rational function of q^(1/D) with factored denominator.

    The denominator is a product of factors (q^e - 1)^m with e > 0; this is
    the exact shape produced by quantum dilogarithm coefficients, and keeping
    it factored makes reduction cheap and denominators small.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: QScalar, den: Mapping[Fraction, int] | None = None, reduce: bool = True):
        self.num = num
        d: dict[Fraction, int] = {}
        if den:
            for e, m in den.items():
                e = Fraction(e)
                if e <= 0:
                    raise ValueError("denominator factors must have positive exponent")
                if m:
                    d[e] = d.get(e, 0) + m
        self.den = d
        if reduce:
            self._reduce()

    @staticmethod
    def of(c) -> "QRat":
        return QRat(QScalar.of(c))

    def _reduce(self) -> None:
        if self.num.is_zero():
            self.den = {}
            return
        for e in sorted(self.den):
            factor = QScalar.q_power(e) - QS_ONE
            while self.den.get(e, 0) > 0:
                try:
                    self.num = self.num.divide_exact(factor)
                except NotDivisible:
                    break
                self.den[e] -= 1
            if self.den.get(e) == 0:
                del self.den[e]

    def den_scalar(self) -> QScalar:
        out = QS_ONE
        for e, m in self.den.items():
            f = QScalar.q_power(e) - QS_ONE
            for _ in range(m):
                out = out * f
        return out

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, QRat):
            return NotImplemented
        return (self.num * other.den_scalar() - other.num * self.den_scalar()).is_zero()

    def __add__(self, other: "QRat") -> "QRat":
        den: dict[Fraction, int] = dict(self.den)
        for e, m in other.den.items():
            den[e] = max(den.get(e, 0), m)
        a = self.num
        for e, m in den.items():
            extra = m - self.den.get(e, 0)
            for _ in range(extra):
                a = a * (QScalar.q_power(e) - QS_ONE)
        b = other.num
        for e, m in den.items():
            extra = m - other.den.get(e, 0)
            for _ in range(extra):
                b = b * (QScalar.q_power(e) - QS_ONE)
        return QRat(a + b, den)

    def __sub__(self, other: "QRat") -> "QRat":
        return self + (-other)

    def __neg__(self) -> "QRat":
        return QRat(-self.num, self.den, reduce=False)

    def __mul__(self, other: "QRat") -> "QRat":
        den = dict(self.den)
        for e, m in other.den.items():
            den[e] = den.get(e, 0) + m
        return QRat(self.num * other.num, den)

    def bar(self) -> "QRat":
        # 1/(q^e - 1) bars to -q^e/(q^e - 1)
        num = self.num.bar()
        for e, m in self.den.items():
            num = num * QScalar({e * m: Fraction((-1) ** m)})
        return QRat(num, self.den, reduce=False)

    def shift(self, e) -> "QRat":
        return QRat(self.num.shift(e), self.den, reduce=False)

    def __repr__(self) -> str:
        if not self.den:
            return repr(self.num)
        dens = " * ".join(f"(q^({e}) - 1)^{m}" for e, m in sorted(self.den.items()))
        return f"({self.num!r}) / ({dens})"


QR_ONE = QRat.of(1)
QR_ZERO = QRat.of(0)


class TorusSeries:
    """Truncated torus series; terms graded by a degree function on exponents."""

    __slots__ = ("algebra", "terms", "order", "degree")

    def __init__(
        self,
        algebra: TorusAlgebra,
        terms: Mapping[Vec, QRat],
        order: int,
        degree: Callable[[Vec], int] | None = None,
    ):
        self.algebra = algebra
        self.order = order
        self.degree = degree if degree is not None else _abs_degree
        self.terms = {}
        for v, c in terms.items():
            vv = vec(v)
            if not c.is_zero() and self.degree(vv) <= order:
                self.terms[vv] = c

    @staticmethod
    def one(algebra: TorusAlgebra, order: int, degree=None) -> "TorusSeries":
        return TorusSeries(algebra, {tuple(Fraction(0) for _ in range(algebra.rank)): QR_ONE}, order, degree)

    @staticmethod
    def from_element(el: TorusElement, order: int, degree=None) -> "TorusSeries":
        return TorusSeries(el.algebra, {v: QRat(c) for v, c in el.terms.items()}, order, degree)

    def __add__(self, other: "TorusSeries") -> "TorusSeries":
        out = dict(self.terms)
        for v, c in other.terms.items():
            out[v] = out.get(v, QR_ZERO) + c
        return TorusSeries(self.algebra, out, self.order, self.degree)

    def __sub__(self, other: "TorusSeries") -> "TorusSeries":
        return self + other.scale(QRat.of(-1))

    def scale(self, c: QRat) -> "TorusSeries":
        return TorusSeries(self.algebra, {v: cv * c for v, cv in self.terms.items()}, self.order, self.degree)

    def __mul__(self, other: "TorusSeries") -> "TorusSeries":
        alg = self.algebra
        out: dict[Vec, QRat] = {}
        for v, cv in self.terms.items():
            for w, cw in other.terms.items():
                u = tuple(a + b for a, b in zip(v, w))
                if self.degree(u) > self.order:
                    continue
                c = (cv * cw).shift(alg.pairing(v, w))
                out[u] = out.get(u, QR_ZERO) + c
        return TorusSeries(alg, out, self.order, self.degree)

    def inverse(self) -> "TorusSeries":
        """Inverse of a series whose constant term is exactly 1."""
        zero = tuple(Fraction(0) for _ in range(self.algebra.rank))
        c0 = self.terms.get(zero)
        if c0 is None or not c0 == QR_ONE:
            raise ZeroDivisionError("series inversion needs constant term 1")
        rest = TorusSeries(self.algebra, {v: c for v, c in self.terms.items() if v != zero}, self.order, self.degree)
        t = rest.scale(QRat.of(-1))
        out = TorusSeries.one(self.algebra, self.order, self.degree)
        power = TorusSeries.one(self.algebra, self.order, self.degree)
        for _ in range(self.order + 1):
            power = power * t
            if not power.terms:
                break
            out = out + power
        return out

    def is_one(self) -> bool:
        zero = tuple(Fraction(0) for _ in range(self.algebra.rank))
        for v, c in self.terms.items():
            if v == zero:
                if not c == QR_ONE:
                    return False
            elif not c.is_zero():
                return False
        return zero in self.terms and self.terms[zero] == QR_ONE

    def __eq__(self, other) -> bool:
        if not isinstance(other, TorusSeries):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(self.terms.get(k, QR_ZERO) == other.terms.get(k, QR_ZERO) for k in keys)

    def __repr__(self) -> str:  # pragma: no cover
        return f"TorusSeries({len(self.terms)} terms, order {self.order})"


def _abs_degree(v: Vec) -> int:
    total = Fraction(0)
    for x in v:
        total += abs(x)
    return int(total) if total.denominator == 1 else int(total) + 1


def dilog_coefficients(n_max: int, d: int = 1) -> list[QRat]:
    """Coefficients psi_n of Psi_{q_d}(x) = sum psi_n x^n, q_d = q^(1/d)."""
    out = [QR_ONE]
    for n in range(1, n_max + 1):
        # psi_n = q_d * psi_{n-1} / (q_d^{2n} - 1)
        step = out[-1] * QRat(QScalar.q_power(Fraction(1, d)), {Fraction(2 * n, d): 1})
        out.append(step)
    return out


def dilog_series(m: TorusElement, order: int, d: int = 1, degree=None, power: int = 1) -> TorusSeries:
    """Psi_{q_d}(m)^power for a monomial m, truncated at the given order."""
    alg = m.algebra
    if m.is_zero():
        return TorusSeries.one(alg, order, degree)
    v = m.monomial_vector()
    c = m.terms[v]
    ts_one = TorusSeries.one(alg, order, degree)
    deg = ts_one.degree
    n_max = order
    dv = deg(v)
    if dv > 0:
        n_max = order // dv + 1
    coeffs = dilog_coefficients(n_max, d)
    terms: dict[Vec, QRat] = {}
    cpow = QS_ONE
    for n in range(n_max + 1):
        w = tuple(Fraction(n) * x for x in v)
        if deg(w) <= order:
            terms[w] = coeffs[n] * QRat(cpow)
        cpow = cpow * c
    series = TorusSeries(alg, terms, order, degree)
    if power == 1:
        return series
    if power == -1:
        return series.inverse()
    raise ValueError("power must be +-1")


def pentagon_check(order: int = 12) -> bool:
    """Psi(X1) Psi(X2) = Psi(X2) Psi(q^{-1} X1 X2) Psi(X1) for X1X2 = q^2 X2X1."""
    form = ((Fraction(0), Fraction(1)), (Fraction(-1), Fraction(0)))
    alg = TorusAlgebra(2, form, 2, "pentagon")
    x1, x2 = alg.unit(0), alg.unit(1)
    x12 = alg.monomial((1, 1))  # q^{-1} X1 X2
    lhs = dilog_series(x1, order) * dilog_series(x2, order)
    rhs = dilog_series(x2, order) * dilog_series(x12, order) * dilog_series(x1, order)
    return lhs == rhs

"""Exact arithmetic for a one-variable Novikov ring and truncated u-series.

The scalar ring is a "Novikov polynomial" ring: finite formal sums

    f = sum_i  r_i * q^(a_i)

whose exponents a_i range over a cyclic subgroup A = g*Z of the rationals
containing the integers (so 1/g is a positive integer), and whose
coefficients r_i live in one of Z, Q, F_p, Z/m.  Exponents are stored as
integer multiples of the generator g, so comparison and arithmetic are
exact.  Completions only ever enter through explicit truncation orders:
a q-order budget for inversion and a u-order N for power series in the
equivariant variable u.

Truncation metadata travels with values.  A NovikovElem may carry a
``trunc`` bound (an exponent index): terms with index >= trunc are
unknown rather than known-zero.  A USeries carries a ``valid`` order:
coefficients of u^k for k >= valid are unknown (this is how the top
order lost by d/du is recorded).  Downstream identity checks use these
bounds to report "verified to order so-and-so" instead of overclaiming.

Doctest flavour::

    >>> s = ScalarSetup.make("1/2", "Q")
    >>> a = s.parse("q^(1/2) + q")
    >>> print(s.format(a * a))
    q + 2*q^(3/2) + q^2
    >>> print(s.format(dq(a)))
    1/2*q^(-1/2) + 1
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

__all__ = [
    "NovikovError",
    "LatticeMismatch",
    "CoefficientError",
    "InversionError",
    "ExponentLattice",
    "CoefficientRing",
    "ScalarSetup",
    "NovikovElem",
    "USeries",
    "dq",
    "invert_truncated",
    "useries_du",
    "useries_udq",
]

INF = math.inf


class NovikovError(ValueError):
    """Base class for structured arithmetic errors."""


class LatticeMismatch(NovikovError):
    pass


class CoefficientError(NovikovError):
    """Derivative or scalar leaves the coefficient ring."""


class InversionError(NovikovError):
    pass


@dataclass(frozen=True)
class ExponentLattice:
    """The cyclic exponent group A = g*Z with 1 an integer multiple of g."""

    generator: Fraction

    def __post_init__(self):
        g = self.generator
        if not isinstance(g, Fraction):
            object.__setattr__(self, "generator", Fraction(g))
            g = self.generator
        if g <= 0:
            raise NovikovError("lattice generator must be positive")
        if (1 / g).denominator != 1:
            raise NovikovError(
                "1 must be an integer multiple of the lattice generator"
            )

    @property
    def steps_per_unit(self) -> int:
        """How many lattice steps make the exponent 1."""
        return int(1 / self.generator)

    def index_of(self, exponent: Union[int, Fraction]) -> int:
        e = Fraction(exponent)
        idx = e / self.generator
        if idx.denominator != 1:
            raise NovikovError(f"exponent {e} not in lattice g={self.generator}")
        return int(idx)

    def exponent_of(self, index: int) -> Fraction:
        return index * self.generator


_FIELD_KINDS = {"Q", "Fp"}


@dataclass(frozen=True)
class CoefficientRing:
    """One of Z, Q, F_p, Z/m.  Coefficients are ints (residues) or Fractions."""

    kind: str  # "Z" | "Q" | "Fp" | "Zmod"
    modulus: Optional[int] = None

    def __post_init__(self):
        if self.kind in ("Z", "Q"):
            if self.modulus is not None:
                raise NovikovError("modulus only allowed for Fp / Zmod")
        elif self.kind == "Fp":
            p = self.modulus
            if p is None or p < 2 or any(p % r == 0 for r in range(2, int(p**0.5) + 1)):
                raise NovikovError(f"{p} is not prime")
        elif self.kind == "Zmod":
            if self.modulus is None or self.modulus < 2:
                raise NovikovError("modulus must be >= 2")
        else:
            raise NovikovError(f"unknown coefficient ring kind {self.kind!r}")

    # -- basic ring structure -------------------------------------------------

    @property
    def is_field(self) -> bool:
        return self.kind in _FIELD_KINDS

    def coerce(self, v):
        if self.kind == "Q":
            return Fraction(v)
        if self.kind == "Z":
            f = Fraction(v)
            if f.denominator != 1:
                raise CoefficientError(f"{v} is not an integer")
            return int(f)
        # residue rings
        f = Fraction(v)
        m = self.modulus
        if f.denominator == 1:
            return int(f) % m
        return self.from_rational(f)

    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def add(self, a, b):
        c = a + b
        return c % self.modulus if self.modulus else c

    def mul(self, a, b):
        c = a * b
        return c % self.modulus if self.modulus else c

    def neg(self, a):
        return (-a) % self.modulus if self.modulus else -a

    def is_zero(self, a) -> bool:
        return a == 0

    def inv(self, a):
        if a == 0:
            raise InversionError("division by zero")
        if self.kind == "Q":
            return 1 / Fraction(a)
        if self.kind == "Fp":
            return pow(int(a), -1, self.modulus)
        raise CoefficientError("inverse requires field coefficients")

    def from_rational(self, r: Fraction):
        """Image of an exact rational in this ring, or CoefficientError."""
        r = Fraction(r)
        if self.kind == "Q":
            return r
        if self.kind == "Z":
            if r.denominator != 1:
                raise CoefficientError(
                    f"derivative leaves coefficient ring: {r} not in Z"
                )
            return int(r)
        m = self.modulus
        if math.gcd(r.denominator, m) != 1:
            raise CoefficientError(
                f"derivative leaves coefficient ring: denominator {r.denominator}"
                f" not invertible mod {m}"
            )
        return (r.numerator * pow(r.denominator, -1, m)) % m

    def mul_rational(self, a, r: Fraction):
        """a * r for a in the ring, r an exact rational."""
        if self.kind == "Q":
            return Fraction(a) * r
        if self.kind == "Z":
            f = Fraction(a) * r
            if f.denominator != 1:
                raise CoefficientError(
                    f"derivative leaves coefficient ring: {a}*{r} not in Z"
                )
            return int(f)
        return self.mul(a, self.from_rational(r))

    # -- text -----------------------------------------------------------------

    def format(self, a) -> str:
        return str(a)

    def parse(self, text: str):
        text = text.strip()
        try:
            return self.coerce(Fraction(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise NovikovError(f"bad coefficient {text!r}") from exc

    def describe(self) -> str:
        if self.kind == "Fp":
            return f"F{self.modulus}"
        if self.kind == "Zmod":
            return f"Z/{self.modulus}"
        return self.kind


def _ring_from_name(name: str) -> CoefficientRing:
    name = name.strip()
    if name == "Z":
        return CoefficientRing("Z")
    if name == "Q":
        return CoefficientRing("Q")
    m = re.fullmatch(r"F(\d+)", name)
    if m:
        return CoefficientRing("Fp", int(m.group(1)))
    m = re.fullmatch(r"Z/(\d+)", name)
    if m:
        return CoefficientRing("Zmod", int(m.group(1)))
    raise NovikovError(f"unknown coefficient ring {name!r}")


@dataclass(frozen=True)
class ScalarSetup:
    """An exponent lattice together with a coefficient ring."""

    lattice: ExponentLattice
    ring: CoefficientRing

    @staticmethod
    def make(generator, ring_name: str) -> "ScalarSetup":
        return ScalarSetup(ExponentLattice(Fraction(generator)),
                           _ring_from_name(ring_name))

    def zero(self) -> "NovikovElem":
        return NovikovElem(self, ())

    def one(self) -> "NovikovElem":
        return self.monomial(1, 0)

    def monomial(self, coeff, exponent) -> "NovikovElem":
        c = self.ring.coerce(coeff)
        if self.ring.is_zero(c):
            return self.zero()
        return NovikovElem(self, ((self.lattice.index_of(exponent), c),))

    def parse(self, text: str) -> "NovikovElem":
        return parse_novikov(text, self)

    def format(self, x: "NovikovElem") -> str:
        return format_novikov(x)

    def describe(self) -> dict:
        return {
            "lattice_generator": str(self.lattice.generator),
            "coefficients": self.ring.describe(),
        }


def _check_same_setup(a: "NovikovElem", b: "NovikovElem"):
    if a.setup != b.setup:
        raise LatticeMismatch(
            f"scalar setup mismatch: {a.setup.describe()} vs {b.setup.describe()}"
        )


@dataclass(frozen=True)
class NovikovElem:
    """Canonical finite sum of q-monomials, with optional truncation bound.

    ``terms`` maps exponent index n (exponent n*g) to a nonzero coefficient,
    stored as a sorted tuple of pairs.  ``trunc`` of None means the element
    is exact; an integer bound means terms with index >= trunc are unknown
    (the element is only guaranteed below that exponent).
    """

    setup: ScalarSetup
    terms: tuple  # ((index, coeff), ...) strictly increasing index
    trunc: Optional[int] = None

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def build(setup: ScalarSetup, pairs, trunc: Optional[int] = None) -> "NovikovElem":
        """Canonicalize: merge, drop zeros, drop terms at/above trunc."""
        ring = setup.ring
        acc: dict = {}
        for idx, c in pairs:
            if trunc is not None and idx >= trunc:
                continue
            acc[idx] = ring.add(acc[idx], c) if idx in acc else c
        out = tuple(
            (idx, acc[idx]) for idx in sorted(acc) if not ring.is_zero(acc[idx])
        )
        return NovikovElem(setup, out, trunc)

    # -- structure ------------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.trunc is None

    def has_terms(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        """Decidably zero: no terms and no unknown tail."""
        return not self.terms and self.trunc is None

    def valuation_index(self):
        """Index of the minimal exponent, or +inf for a termless element."""
        return self.terms[0][0] if self.terms else INF

    def valuation(self):
        """Minimal exponent as a Fraction, or None for a termless element."""
        if not self.terms:
            return None
        return self.setup.lattice.exponent_of(self.terms[0][0])

    def leading(self):
        if not self.terms:
            raise InversionError("division by zero")
        return self.terms[0]

    def exponents(self):
        g = self.setup.lattice.generator
        return [n * g for n, _ in self.terms]

    # -- arithmetic -----------------------------------------------------------

    def _trunc_add(self, other):
        ta = self.trunc if self.trunc is not None else INF
        tb = other.trunc if other.trunc is not None else INF
        t = min(ta, tb)
        return None if t == INF else int(t)

    def __add__(self, other: "NovikovElem") -> "NovikovElem":
        _check_same_setup(self, other)
        return NovikovElem.build(
            self.setup, self.terms + other.terms, self._trunc_add(other)
        )

    def __neg__(self) -> "NovikovElem":
        ring = self.setup.ring
        return NovikovElem(
            self.setup,
            tuple((n, ring.neg(c)) for n, c in self.terms),
            self.trunc,
        )

    def __sub__(self, other: "NovikovElem") -> "NovikovElem":
        return self + (-other)

    def __mul__(self, other: "NovikovElem") -> "NovikovElem":
        _check_same_setup(self, other)
        ring = self.setup.ring
        ta = self.trunc if self.trunc is not None else INF
        tb = other.trunc if other.trunc is not None else INF
        t = min(self.valuation_index() + tb, other.valuation_index() + ta)
        trunc = None if t == INF else int(t)
        pairs = [
            (na + nb, ring.mul(ca, cb))
            for na, ca in self.terms
            for nb, cb in other.terms
        ]
        return NovikovElem.build(self.setup, pairs, trunc)

    def scale(self, coeff) -> "NovikovElem":
        c = self.setup.ring.coerce(coeff)
        ring = self.setup.ring
        return NovikovElem.build(
            self.setup, ((n, ring.mul(a, c)) for n, a in self.terms), self.trunc
        )

    def q_shift(self, steps: int) -> "NovikovElem":
        """Multiply by q^(steps * g)."""
        return NovikovElem(
            self.setup,
            tuple((n + steps, c) for n, c in self.terms),
            None if self.trunc is None else self.trunc + steps,
        )

    def truncate(self, bound: int) -> "NovikovElem":
        t = bound if self.trunc is None else min(bound, self.trunc)
        return NovikovElem.build(self.setup, self.terms, t)

    def specialize_q1(self):
        """Sum of coefficients: the image under q -> 1."""
        ring = self.setup.ring
        acc = ring.zero()
        for _, c in self.terms:
            acc = ring.add(acc, c)
        return acc

    def map_coefficients(self, target: ScalarSetup) -> "NovikovElem":
        """Push coefficients into another ring over the same lattice."""
        if target.lattice != self.setup.lattice:
            raise LatticeMismatch("cannot change lattice in map_coefficients")
        return NovikovElem.build(
            target, ((n, target.ring.coerce(c)) for n, c in self.terms), self.trunc
        )

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        return format_novikov(self)


def dq(a: NovikovElem) -> NovikovElem:
    """The derivation q -> d/dq:  r*q^e  |->  (r*e)*q^(e-1)."""
    lat = a.setup.lattice
    ring = a.setup.ring
    step = lat.steps_per_unit
    pairs = []
    for n, c in a.terms:
        e = lat.exponent_of(n)
        if e == 0:
            continue
        pairs.append((n - step, ring.mul_rational(c, e)))
    trunc = None if a.trunc is None else a.trunc - step
    return NovikovElem.build(a.setup, pairs, trunc)


def invert_truncated(a: NovikovElem, q_order: int) -> NovikovElem:
    """Truncated inverse over a Novikov field.

    Returns b with a*b = 1 up to terms of exponent index >= q_order counted
    from the constant (the result's trunc is -lead + q_order, i.e. q_order
    lattice steps of correct data past the leading term of b).  Monomials
    invert exactly.
    """
    if not a.setup.ring.is_field:
        raise CoefficientError("inverse requires field coefficients")
    if not a.terms:
        raise InversionError("division by zero")
    setup = a.setup
    ring = setup.ring
    e, c = a.leading()
    lead_inv = NovikovElem(setup, ((-e, ring.inv(c)),))
    if len(a.terms) == 1:
        # exact monomial inverse, but respect any unknown tail of the input
        if a.trunc is None:
            return lead_inv
        return lead_inv.truncate(a.trunc - 2 * e)
    bound = q_order
    if a.trunc is not None:
        bound = min(bound, a.trunc - e)
    # a = c q^e (1 - s) with s of positive valuation gap; geometric series.
    s = (setup.one() - (lead_inv * a)).truncate(bound)
    acc = setup.one().truncate(bound)
    term = s
    while term.has_terms():
        acc = acc + term
        term = (term * s).truncate(bound)
    out = lead_inv * acc
    return out.truncate(-e + bound)


# -- truncated power series in u ---------------------------------------------


@dataclass(frozen=True)
class USeries:
    """Power series in u over NovikovElem, truncated at order N.

    ``coeffs`` has length exactly N; ``valid`` <= N is the number of leading
    orders that are guaranteed (coefficients at index >= valid are unknown
    and stored as zero).  All arithmetic propagates the weaker bound.
    """

    setup: ScalarSetup
    order: int
    coeffs: tuple
    valid: int = field(default=-1)

    def __post_init__(self):
        if self.valid == -1:
            object.__setattr__(self, "valid", self.order)
        if len(self.coeffs) != self.order:
            raise NovikovError("coefficient list length must equal order")

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero(setup: ScalarSetup, order: int) -> "USeries":
        z = setup.zero()
        return USeries(setup, order, (z,) * order)

    @staticmethod
    def from_novikov(c: NovikovElem, order: int, u_power: int = 0) -> "USeries":
        z = c.setup.zero()
        coeffs = [z] * order
        if u_power < order:
            coeffs[u_power] = c
        return USeries(c.setup, order, tuple(coeffs))

    @staticmethod
    def build(setup: ScalarSetup, order: int, coeffs, valid=None) -> "USeries":
        z = setup.zero()
        cs = list(coeffs)[:order]
        cs += [z] * (order - len(cs))
        v = order if valid is None else min(valid, order)
        cs = [c if k < v else z for k, c in enumerate(cs)]
        return USeries(setup, order, tuple(cs), v)

    # -- structure ------------------------------------------------------------

    def is_zero_to(self, order: Optional[int] = None) -> bool:
        """No visible terms below min(valid, order).

        Coefficients may still carry unknown q-tails; use q_certificate()
        to learn the exponent order to which the zero is certified.
        """
        v = self.valid if order is None else min(order, self.valid)
        return all(not self.coeffs[k].has_terms() for k in range(v))

    def q_certificate(self) -> Optional[int]:
        """Minimal coefficient trunc index, or None if every coeff is exact."""
        bounds = [c.trunc for c in self.coeffs[: self.valid] if c.trunc is not None]
        return min(bounds) if bounds else None

    def u_valuation(self) -> Optional[int]:
        for k in range(self.valid):
            if self.coeffs[k].has_terms():
                return k
        return None

    # -- arithmetic -----------------------------------------------------------

    def _common(self, other: "USeries"):
        if self.setup != other.setup:
            raise LatticeMismatch("scalar setup mismatch in USeries arithmetic")
        if self.order != other.order:
            raise NovikovError("truncation order mismatch in USeries arithmetic")

    def __add__(self, other: "USeries") -> "USeries":
        self._common(other)
        v = min(self.valid, other.valid)
        return USeries.build(
            self.setup,
            self.order,
            [a + b for a, b in zip(self.coeffs, other.coeffs)],
            v,
        )

    def __neg__(self) -> "USeries":
        return USeries(self.setup, self.order,
                       tuple(-c for c in self.coeffs), self.valid)

    def __sub__(self, other: "USeries") -> "USeries":
        return self + (-other)

    def __mul__(self, other: "USeries") -> "USeries":
        self._common(other)
        N = self.order
        va = self.u_valuation()
        vb = other.u_valuation()
        v = min(
            N,
            (va if va is not None else N) + other.valid,
            (vb if vb is not None else N) + self.valid,
        )
        z = self.setup.zero()
        out = [z] * N
        for i, a in enumerate(self.coeffs[: self.valid]):
            if not a.has_terms():
                continue
            for j, b in enumerate(other.coeffs[: other.valid]):
                if i + j >= N:
                    break
                out[i + j] = out[i + j] + (a * b)
        return USeries.build(self.setup, N, out, v)

    def scale(self, c: NovikovElem) -> "USeries":
        return USeries.build(
            self.setup, self.order, [a * c for a in self.coeffs], self.valid
        )

    def times_u(self, k: int = 1) -> "USeries":
        z = self.setup.zero()
        coeffs = (z,) * k + self.coeffs[: max(0, self.order - k)]
        return USeries.build(self.setup, self.order, coeffs,
                             min(self.order, self.valid + k))

    def truncate_valid(self, v: int) -> "USeries":
        return USeries.build(self.setup, self.order, self.coeffs,
                             min(self.valid, v))

    def shift_down(self, k: int) -> "USeries":
        """Divide by u^k; the dropped coefficients must be zero."""
        for j in range(min(k, self.valid)):
            if self.coeffs[j].has_terms():
                raise NovikovError("shift_down would drop a nonzero coefficient")
        return USeries.build(self.setup, self.order, self.coeffs[k:],
                             max(0, self.valid - k))

    def __bool__(self):
        return any(c.has_terms() for c in self.coeffs[: self.valid])

    def __str__(self):
        return format_useries(self)


def useries_du(a: USeries) -> USeries:
    """d/du: coefficient of u^k becomes (k+1)*a_{k+1}; loses the top order.

    The result is re-padded to length N with the lost order recorded in
    ``valid`` (= old valid - 1).
    """
    ring = a.setup.ring
    out = []
    for k in range(1, a.valid):
        out.append(a.coeffs[k].scale(ring.coerce(k)))
    return USeries.build(a.setup, a.order, out, max(0, a.valid - 1))


def useries_udq(a: USeries) -> USeries:
    """Coefficientwise d/dq."""
    return USeries.build(a.setup, a.order, [dq(c) for c in a.coeffs], a.valid)


def useries_invert_unit(p: USeries, q_order: int) -> USeries:
    """Inverse of a u-series whose u^0 coefficient is nonzero (field coeffs).

    Standard power-series recursion; the constant term is inverted with the
    given q-order budget, so coefficients may carry truncation metadata.
    """
    p0 = p.coeffs[0]
    if not p0.has_terms():
        raise InversionError("u-series is not a unit (u^0 coefficient vanishes)")
    b0 = invert_truncated(p0, q_order)
    setup = p.setup
    out = [b0]
    for k in range(1, p.order):
        acc = setup.zero()
        for j in range(1, k + 1):
            pj = p.coeffs[j] if j < p.valid else setup.zero()
            acc = acc + (pj * out[k - j])
        out.append(-(b0 * acc))
    return USeries.build(setup, p.order, out, p.valid)


# -- text grammar -------------------------------------------------------------
#
#   novikov :=  term (("+"|"-") term)*
#   term    :=  coeff | coeff "*" qpow | qpow
#   qpow    :=  "q" | "q^" int | "q^(" rational ")"
#   series  :=  c0 "+" "(" novikov ")*u" "+" "(" novikov ")*u^" int ...


def _split_top_level(text: str):
    """Split on +/- at paren depth 0 (not after '^', '*', '(' or at start)."""
    parts = []
    sign = 1
    depth = 0
    cur = ""
    prev_significant = ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise NovikovError(f"unbalanced parens in {text!r}")
        if ch in "+-" and depth == 0 and prev_significant not in ("", "^", "*", "(", "e", "E"):
            parts.append((sign, cur))
            sign = 1 if ch == "+" else -1
            cur = ""
            prev_significant = ""
            continue
        if ch in "+-" and depth == 0 and prev_significant == "":
            if ch == "-":
                sign = -sign
            continue
        cur += ch
        if not ch.isspace():
            prev_significant = ch
    if depth != 0:
        raise NovikovError(f"unbalanced parens in {text!r}")
    parts.append((sign, cur))
    return [(s, p.strip()) for s, p in parts if p.strip()]


_TERM_RE = re.compile(
    r"""^(?:(?P<coeff>[0-9][0-9/]*)\s*\*?\s*)?          # optional coefficient
         (?:q(?:\^(?:(?P<iexp>-?\d+)|\((?P<rexp>-?\d+(?:/\d+)?)\)))?)?$""",
    re.VERBOSE,
)


def parse_novikov(text: str, setup: ScalarSetup) -> NovikovElem:
    text = text.strip()
    if text in ("", "0"):
        return setup.zero()
    pairs = []
    for sign, part in _split_top_level(text):
        part = part.replace(" ", "")
        m = _TERM_RE.match(part)
        if not m or (m.group("coeff") is None and "q" not in part):
            raise NovikovError(f"cannot parse novikov term {part!r}")
        coeff = setup.ring.parse(m.group("coeff")) if m.group("coeff") else setup.ring.one()
        if sign < 0:
            coeff = setup.ring.neg(coeff)
        if "q" in part:
            if m.group("iexp") is not None:
                exp = Fraction(int(m.group("iexp")))
            elif m.group("rexp") is not None:
                exp = Fraction(m.group("rexp"))
            else:
                exp = Fraction(1)
        else:
            exp = Fraction(0)
        pairs.append((setup.lattice.index_of(exp), coeff))
    return NovikovElem.build(setup, pairs)


def _format_qpow(exp: Fraction) -> str:
    if exp == 1:
        return "q"
    if exp.denominator == 1 and exp >= 0:
        return f"q^{exp.numerator}"
    return f"q^({exp})"


def format_novikov(x: NovikovElem) -> str:
    if not x.terms:
        return "0"
    ring = x.setup.ring
    g = x.setup.lattice.generator
    out = ""
    for n, c in x.terms:
        exp = n * g
        cs = ring.format(c)
        negative = cs.startswith("-")
        mag = cs[1:] if negative else cs
        if exp == 0:
            body = mag
        elif mag == "1":
            body = _format_qpow(exp)
        else:
            body = f"{mag}*{_format_qpow(exp)}"
        if not out:
            out = ("-" if negative else "") + body
        else:
            out += (" - " if negative else " + ") + body
    return out


def parse_useries(text: str, setup: ScalarSetup, order: int) -> USeries:
    text = text.strip()
    z = setup.zero()
    coeffs = [z] * order
    if text in ("", "0"):
        return USeries(setup, order, tuple(coeffs))
    for sign, part in _split_top_level(text):
        part = part.strip()
        m = re.fullmatch(r"(?:\((?P<c>[^)]*)\)\s*\*\s*)?u(?:\^(?P<k>\d+))?", part)
        if m:
            k = int(m.group("k") or 1)
            c = parse_novikov(m.group("c") or "1", setup)
        else:
            k = 0
            c = parse_novikov(part, setup)
        if sign < 0:
            c = -c
        if k >= order:
            raise NovikovError(
                f"series term u^{k} at or above truncation order {order}"
            )
        coeffs[k] = coeffs[k] + c
    return USeries(setup, order, tuple(coeffs))


def format_useries(a: USeries) -> str:
    parts = []
    for k in range(a.valid):
        c = a.coeffs[k]
        if not c.has_terms():
            continue
        body = format_novikov(c)
        if k == 0:
            parts.append(body)
        else:
            upow = "u" if k == 1 else f"u^{k}"
            parts.append(f"({body})*{upow}")
    return " + ".join(parts) if parts else "0"

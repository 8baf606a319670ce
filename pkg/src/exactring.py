"""
Exact Ring Tower
Integers, p-local rationals, residue rings, cyclotomic quotients and lifts,
polynomial extensions, fraction fields and localizations, all with exact
element arithmetic and unique normal forms.

Rings are described declaratively by a RingDescriptor and materialised by
make_ring(), which returns an immutable, shareable handle.
"""
import itertools
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy import QQ, ZZ, Rational, isprime, multiplicity
from sympy.polys.fields import field as sympy_field
from sympy.polys.polyerrors import CoercionFailed, ExactQuotientFailed
from sympy.polys.rings import PolyElement, ring as sympy_ring

from .errors import (AmbiguousQuotient, InvalidDescriptor, NoLiftDeclared,
                     NotDivisible, NotFinite, NotIntegral,
                     RingMismatch)

logger = logging.getLogger(__name__)

INTEGERS = "integers"
P_LOCAL = "p-local"
MODULAR = "modular"
CYCLOTOMIC_QUOTIENT = "cyclotomic-quotient"
CYCLOTOMIC_LIFT = "cyclotomic-lift"
POLYNOMIAL = "polynomial"
FRACTION = "fraction"
LOCALIZATION = "localization"

RING_KINDS = (INTEGERS, P_LOCAL, MODULAR, CYCLOTOMIC_QUOTIENT, CYCLOTOMIC_LIFT,
              POLYNOMIAL, FRACTION, LOCALIZATION)

# Largest ring for which Cayley tables are built.
MAX_TABLE_SIZE = 256


@dataclass(frozen=True)
class RingDescriptor:
    """
    Declarative description of a ring in the tower.

    kind selects the variant; p, l, modulus, base, variables and inverted
    are only meaningful for the variants that use them.
    """
    kind: str
    p: Optional[int] = None
    l: Optional[int] = None
    modulus: Optional[int] = None
    base: Optional["RingDescriptor"] = None
    variables: Tuple[str, ...] = ()
    inverted: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in RING_KINDS:
            raise InvalidDescriptor(f"unknown ring kind {self.kind!r}")
        if self.kind in (P_LOCAL, CYCLOTOMIC_QUOTIENT, CYCLOTOMIC_LIFT):
            if self.p is None or not isprime(self.p):
                raise InvalidDescriptor(f"{self.kind}: p={self.p} is not prime")
        if self.kind in (CYCLOTOMIC_QUOTIENT, CYCLOTOMIC_LIFT):
            if self.l is None or self.l < 1:
                raise InvalidDescriptor(f"{self.kind}: l must be >= 1, got {self.l}")
        if self.kind == MODULAR and (self.modulus is None or self.modulus < 2):
            raise InvalidDescriptor(f"modular: N must be >= 2, got {self.modulus}")
        if self.kind in (POLYNOMIAL, FRACTION, LOCALIZATION) and self.base is None:
            raise InvalidDescriptor(f"{self.kind} needs a base ring")
        if self.kind == POLYNOMIAL:
            if not self.variables or len(set(self.variables)) != len(self.variables):
                raise InvalidDescriptor("polynomial: variable names must be distinct and non-empty")
        if self.kind == FRACTION and self.base.kind in (MODULAR, CYCLOTOMIC_QUOTIENT):
            raise InvalidDescriptor("fraction field of a ring with zero divisors")
        if self.kind == LOCALIZATION:
            if self.base.kind != POLYNOMIAL:
                raise InvalidDescriptor("localization needs a polynomial base")
            missing = set(self.inverted) - set(self.base.variables)
            if missing or not self.inverted:
                raise InvalidDescriptor(f"localization: cannot invert {sorted(missing) or '()'}")

    @classmethod
    def integers(cls) -> "RingDescriptor":
        return cls(INTEGERS)

    @classmethod
    def p_local(cls, p: int) -> "RingDescriptor":
        return cls(P_LOCAL, p=p)

    @classmethod
    def modular(cls, n: int) -> "RingDescriptor":
        return cls(MODULAR, modulus=n)

    @classmethod
    def cyclotomic_quotient(cls, p: int, l: int) -> "RingDescriptor":
        return cls(CYCLOTOMIC_QUOTIENT, p=p, l=l)

    @classmethod
    def cyclotomic_lift(cls, p: int, l: int) -> "RingDescriptor":
        return cls(CYCLOTOMIC_LIFT, p=p, l=l)

    @classmethod
    def polynomial(cls, base: "RingDescriptor", variables: Sequence[str]) -> "RingDescriptor":
        return cls(POLYNOMIAL, base=base, variables=tuple(variables))

    @classmethod
    def fraction(cls, base: "RingDescriptor") -> "RingDescriptor":
        return cls(FRACTION, base=base)

    @classmethod
    def localization(cls, base: "RingDescriptor", inverted: Sequence[str]) -> "RingDescriptor":
        return cls(LOCALIZATION, base=base, inverted=tuple(inverted))

    @classmethod
    def from_mapping(cls, cfg: Mapping[str, Any], key: str = "ring") -> "RingDescriptor":
        """Build a descriptor from config keys such as ring, p, l, modulus."""
        kind = str(cfg.get(key, "")).strip().strip('"')
        try:
            if kind == INTEGERS:
                return cls.integers()
            if kind == P_LOCAL:
                return cls.p_local(int(cfg["p"]))
            if kind == MODULAR:
                return cls.modular(int(cfg["modulus"]))
            if kind == CYCLOTOMIC_QUOTIENT:
                return cls.cyclotomic_quotient(int(cfg["p"]), int(cfg["l"]))
            if kind == CYCLOTOMIC_LIFT:
                return cls.cyclotomic_lift(int(cfg["p"]), int(cfg["l"]))
        except KeyError as exc:
            raise InvalidDescriptor(f"ring {kind!r} needs key {exc.args[0]!r}") from exc
        except ValueError as exc:
            raise InvalidDescriptor(f"ring {kind!r}: {exc}") from exc
        raise InvalidDescriptor(f"ring {kind!r} cannot be declared in a config file")

    def describe(self) -> str:
        if self.kind == INTEGERS:
            return "Z"
        if self.kind == P_LOCAL:
            return f"Z_({self.p})"
        if self.kind == MODULAR:
            return f"Z/{self.modulus}"
        if self.kind == CYCLOTOMIC_QUOTIENT:
            return f"Z[zeta_{self.p}^{self.l}]/({self.p}^{self.l})"
        if self.kind == CYCLOTOMIC_LIFT:
            return f"Z_({self.p})[zeta_{self.p}^{self.l}]"
        if self.kind == POLYNOMIAL:
            return f"{self.base.describe()}[{','.join(self.variables)}]"
        if self.kind == FRACTION:
            return f"Frac({self.base.describe()})"
        return f"{self.base.describe()}[{','.join(n + '^-1' for n in self.inverted)}]"


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(int(x.p), int(x.q))
    return Fraction(x)


def p_valuation(q, p: int) -> float:
    """p-adic valuation of a rational number; infinity for zero."""
    q = _as_fraction(q)
    if q == 0:
        return math.inf
    return multiplicity(p, q.numerator) - multiplicity(p, q.denominator)


class Residue:
    """Element of Z/N stored as its representative in [0, N)."""

    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: int):
        self.value = int(value) % modulus
        self.modulus = modulus

    def _other(self, other) -> Optional[int]:
        if isinstance(other, Residue):
            if other.modulus != self.modulus:
                return None
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other)
        return None

    def __add__(self, other):
        v = self._other(other)
        if v is None:
            return NotImplemented
        return Residue(self.value + v, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._other(other)
        if v is None:
            return NotImplemented
        return Residue(self.value - v, self.modulus)

    def __rsub__(self, other):
        v = self._other(other)
        if v is None:
            return NotImplemented
        return Residue(v - self.value, self.modulus)

    def __mul__(self, other):
        v = self._other(other)
        if v is None:
            return NotImplemented
        return Residue(self.value * v, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.modulus)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a residue")
        return Residue(pow(self.value, e, self.modulus), self.modulus)

    def __eq__(self, other):
        v = self._other(other)
        if v is None:
            return NotImplemented
        return (self.value - v) % self.modulus == 0

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.modulus})"


class Ring(ABC):
    """
    Handle for one ring of the tower.

    Elements support +, -, * and non-negative integer powers directly;
    the handle supplies constants, coercion, exact division and the
    p-adic bookkeeping the verification suites need.
    """

    def __init__(self, descriptor: RingDescriptor):
        self.descriptor = descriptor

    def __repr__(self):
        return f"<ring {self.descriptor.describe()}>"

    @property
    def zero(self):
        return self.from_int(0)

    @property
    def one(self):
        return self.from_int(1)

    @abstractmethod
    def from_int(self, n: int):
        ...

    @abstractmethod
    def from_fraction(self, q) -> Any:
        ...

    def coerce(self, x):
        if isinstance(x, (int, np.integer)):
            return self.from_int(int(x))
        if isinstance(x, (Fraction, Rational)):
            return self.from_fraction(x)
        return x

    def is_zero(self, x) -> bool:
        return x == 0

    @abstractmethod
    def exact_div(self, x, y):
        ...

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def cardinality(self) -> int:
        raise NotFinite(f"{self.descriptor.describe()} is infinite")

    def elements(self) -> Iterator:
        raise NotFinite(f"{self.descriptor.describe()} is infinite")

    @property
    def p_torsion_free(self) -> bool:
        return True

    @property
    def contains_rationals(self) -> bool:
        return False

    @property
    def gens(self) -> Dict[str, Any]:
        return {}

    def valuation(self, x, p: int) -> float:
        """Minimum p-adic valuation over the rational coordinates of x."""
        raise NotImplementedError(f"no p-adic valuation on {self.descriptor.describe()}")

    def to_text(self, x) -> str:
        return str(x)

    @abstractmethod
    def random_element(self, rng: np.random.Generator):
        ...

    def kills(self, n: int) -> bool:
        """True when n = 0 holds in the ring."""
        return self.is_zero(self.from_int(n))

    def _zero_divisor(self, x):
        if self.is_zero(x):
            raise AmbiguousQuotient("0/0 has every element as quotient")
        raise NotDivisible(f"division of {self.to_text(x)} by zero")


class IntegerRing(Ring):

    def from_int(self, n):
        return int(n)

    def from_fraction(self, q):
        q = _as_fraction(q)
        if q.denominator != 1:
            raise NotIntegral(f"{q} is not an integer")
        return q.numerator

    def exact_div(self, x, y):
        if y == 0:
            self._zero_divisor(x)
        q, r = divmod(x, y)
        if r:
            raise NotDivisible(f"{x} is not divisible by {y} in Z")
        return q

    def valuation(self, x, p):
        return p_valuation(x, p)

    def random_element(self, rng):
        return int(rng.integers(-60, 61))


class PLocalRing(Ring):
    """Z_(p): rationals whose reduced denominator is prime to p."""

    def __init__(self, descriptor):
        super().__init__(descriptor)
        self.p = descriptor.p

    def from_int(self, n):
        return Fraction(int(n))

    def from_fraction(self, q):
        q = _as_fraction(q)
        if q.denominator % self.p == 0:
            raise NotIntegral(f"{q} has denominator divisible by {self.p}")
        return q

    def exact_div(self, x, y):
        if y == 0:
            self._zero_divisor(x)
        q = _as_fraction(x) / _as_fraction(y)
        if q.denominator % self.p == 0:
            raise NotDivisible(f"{x}/{y} is not {self.p}-integral")
        return q

    def valuation(self, x, p):
        return p_valuation(x, p)

    def random_element(self, rng):
        den = int(rng.integers(1, 12))
        while den % self.p == 0:
            den += 1
        return Fraction(int(rng.integers(-40, 41)), den)


class RationalField(Ring):

    def from_int(self, n):
        return Fraction(int(n))

    def from_fraction(self, q):
        return _as_fraction(q)

    def exact_div(self, x, y):
        if y == 0:
            self._zero_divisor(x)
        return _as_fraction(x) / _as_fraction(y)

    @property
    def contains_rationals(self):
        return True

    def valuation(self, x, p):
        return p_valuation(x, p)

    def random_element(self, rng):
        return Fraction(int(rng.integers(-40, 41)), int(rng.integers(1, 12)))


class ModularRing(Ring):

    def __init__(self, descriptor):
        super().__init__(descriptor)
        self.modulus = descriptor.modulus

    def from_int(self, n):
        return Residue(n, self.modulus)

    def from_fraction(self, q):
        q = _as_fraction(q)
        if math.gcd(q.denominator, self.modulus) != 1:
            raise NotDivisible(f"{q.denominator} is not invertible mod {self.modulus}")
        return Residue(q.numerator * pow(q.denominator, -1, self.modulus), self.modulus)

    def exact_div(self, x, y):
        x, y = self.coerce(x), self.coerce(y)
        solutions = [q for q in self.elements() if q * y == x]
        if not solutions:
            raise NotDivisible(f"{x.value} is not divisible by {y.value} mod {self.modulus}")
        if len(solutions) > 1:
            raise AmbiguousQuotient(
                f"{x.value}/{y.value} mod {self.modulus} has {len(solutions)} quotients")
        return solutions[0]

    @property
    def is_finite(self):
        return True

    @property
    def cardinality(self):
        return self.modulus

    def elements(self):
        return (Residue(v, self.modulus) for v in range(self.modulus))

    @property
    def p_torsion_free(self):
        return False

    def to_text(self, x):
        return str(self.coerce(x).value)

    def random_element(self, rng):
        return Residue(int(rng.integers(self.modulus)), self.modulus)


class CyclotomicElement:
    """
    Element of a ring S[Z]/(Phi_{p^l}(Z)) stored as its d coefficients
    in the power basis 1, Z, ..., Z^(d-1), d = (p-1)p^(l-1).
    """

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: "CyclotomicRing", coeffs: Tuple):
        self.ring = ring
        self.coeffs = coeffs

    def _other(self, other):
        if isinstance(other, CyclotomicElement):
            return other if other.ring is self.ring else None
        try:
            return self.ring.coerce(other)
        except (TypeError, NotIntegral, CoercionFailed):
            return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.ring._make(a + b for a, b in zip(self.coeffs, o.coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.ring._make(a - b for a, b in zip(self.coeffs, o.coeffs))

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return self.ring._make(-a for a in self.coeffs)

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.ring._multiply(self, o)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power in a cyclotomic ring")
        result, base = self.ring.one, self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return all(a == b for a, b in zip(self.coeffs, o.coeffs))

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return any(bool(c) for c in self.coeffs)

    def __repr__(self):
        return self.ring.to_text(self)


class CyclotomicRing(Ring):
    """
    S[Z]/(Phi_{p^l}(Z)) over a scalar ring S.

    The scalar ring decides the variant: Z/p^l gives the cyclotomic
    quotient, Z_(p) the lift, Q its fraction field, and a sympy polynomial
    ring a polynomial extension of either.
    """

    def __init__(self, descriptor, p: int, l: int, scalars: Ring):
        super().__init__(descriptor)
        self.p, self.l = p, l
        self.scalars = scalars
        self.step = p ** (l - 1)
        self.degree = (p - 1) * self.step
        self._zero_coeffs = tuple(scalars.zero for _ in range(self.degree))

    def _make(self, coeffs) -> CyclotomicElement:
        return CyclotomicElement(self, tuple(self.scalars.coerce(c) for c in coeffs))

    def from_coefficients(self, coeffs: Sequence) -> CyclotomicElement:
        """Element from power-basis coefficients of any length."""
        return self._make(self._reduce(list(coeffs)))

    def _reduce(self, raw: List) -> List:
        # Z^d = -(1 + Z^m + ... + Z^((p-2)m)), m = p^(l-1)
        d, m = self.degree, self.step
        raw = list(raw) + [0] * max(0, d - len(raw))
        for e in range(len(raw) - 1, d - 1, -1):
            c = raw[e]
            if c == 0:
                continue
            raw[e] = 0
            for j in range(self.p - 1):
                raw[e - d + j * m] = raw[e - d + j * m] - c
        return raw[:d]

    def _multiply(self, x: CyclotomicElement, y: CyclotomicElement) -> CyclotomicElement:
        d = self.degree
        raw = [0] * (2 * d - 1)
        for i, a in enumerate(x.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(y.coeffs):
                if b == 0:
                    continue
                raw[i + j] = raw[i + j] + a * b
        return self._make(self._reduce(raw))

    def from_int(self, n):
        return self._make((self.scalars.from_int(n),) + self._zero_coeffs[1:])

    def from_fraction(self, q):
        return self._make((self.scalars.from_fraction(q),) + self._zero_coeffs[1:])

    def coerce(self, x):
        if isinstance(x, CyclotomicElement):
            if x.ring is not self:
                raise TypeError(f"element of {x.ring} used in {self}")
            return x
        if isinstance(x, (int, np.integer, Fraction, Rational)):
            return super().coerce(x)
        return self._make((self.scalars.coerce(x),) + self._zero_coeffs[1:])

    @property
    def gens(self):
        zeta = [self.scalars.zero] * self.degree
        if self.degree > 1:
            zeta[1] = self.scalars.one
            return {"zeta": self._make(zeta)}
        # p = 2, l = 1: zeta = -1
        return {"zeta": self.from_int(-1)}

    @property
    def zeta(self) -> CyclotomicElement:
        return self.gens["zeta"]

    def is_zero(self, x):
        return not any(bool(c) for c in self.coerce(x).coeffs)

    def exact_div(self, x, y):
        x, y = self.coerce(x), self.coerce(y)
        if self.is_zero(y):
            self._zero_divisor(x)
        if self.is_finite:
            solutions = [q for q in self.elements() if q * y == x]
            if not solutions:
                raise NotDivisible(f"{self.to_text(x)} is not divisible by {self.to_text(y)}")
            if len(solutions) > 1:
                raise AmbiguousQuotient(
                    f"{self.to_text(x)}/{self.to_text(y)} has {len(solutions)} quotients")
            return solutions[0]
        inverse = self._constant_inverse(y)
        # x * (1/y) over Q, then checked against the scalar ring
        raw = [0] * (2 * self.degree - 1)
        for i, a in enumerate(x.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(inverse):
                if b:
                    raw[i + j] = raw[i + j] + a * _scalar_from_fraction(self.scalars, b)
        reduced = self._reduce(raw)
        try:
            return self._make(reduced)
        except NotIntegral as exc:
            raise NotDivisible(
                f"{self.to_text(x)}/{self.to_text(y)} leaves {self.descriptor.describe()}") from exc

    def _constant_inverse(self, y: CyclotomicElement) -> List[Fraction]:
        """Power-basis coordinates of 1/y in Q(zeta); y must have rational coordinates."""
        coords = []
        for c in y.coeffs:
            try:
                coords.append(_rational_constant(c))
            except ValueError as exc:
                raise NotDivisible(f"cannot divide by non-constant {self.to_text(y)}") from exc
        rational = _rational_cyclotomic(self.p, self.l)
        y_rat = rational.from_coefficients(coords)
        d = self.degree
        basis = [rational.from_coefficients([0] * k + [1]) for k in range(d)]
        columns = [(y_rat * b).coeffs for b in basis]
        matrix = sympy.Matrix(d, d, lambda i, j: Rational(columns[j][i].numerator,
                                                           columns[j][i].denominator))
        rhs = sympy.Matrix([1] + [0] * (d - 1))
        solution = matrix.LUsolve(rhs)
        return [Fraction(int(s.p), int(s.q)) for s in solution]

    @property
    def is_finite(self):
        return self.scalars.is_finite

    @property
    def cardinality(self):
        return self.scalars.cardinality ** self.degree

    def elements(self):
        scalars = list(self.scalars.elements())
        for combo in itertools.product(scalars, repeat=self.degree):
            yield CyclotomicElement(self, tuple(combo))

    @property
    def p_torsion_free(self):
        return self.scalars.p_torsion_free

    @property
    def contains_rationals(self):
        return self.scalars.contains_rationals

    def valuation(self, x, p):
        return min(self.scalars.valuation(c, p) for c in self.coerce(x).coeffs)

    def to_text(self, x):
        x = self.coerce(x)
        terms = []
        for k, c in enumerate(x.coeffs):
            if c == 0:
                continue
            text = self.scalars.to_text(c)
            if k == 0:
                terms.append(text)
            else:
                power = "zeta" if k == 1 else f"zeta^{k}"
                terms.append(f"({text})*{power}")
        return " + ".join(terms) if terms else "0"

    def random_element(self, rng):
        return self._make(self.scalars.random_element(rng) for _ in range(self.degree))


def _rational_constant(c) -> Fraction:
    if isinstance(c, (int, Fraction)):
        return _as_fraction(c)
    if isinstance(c, Residue):
        return Fraction(c.value)
    if isinstance(c, PolyElement):
        if c.is_ground:
            return _as_fraction(c.ring.domain.to_sympy(c.LC if c else c.ring.domain.zero))
        raise ValueError("non-constant polynomial")
    raise ValueError(f"unsupported scalar {c!r}")


def _scalar_from_fraction(scalars: Ring, q: Fraction):
    if isinstance(scalars, SympyPolynomialRing):
        return scalars.poly_ring.from_expr(Rational(q.numerator, q.denominator))
    return _as_fraction(q)


class SympyPolynomialRing(Ring):
    """
    Polynomial extension backed by sympy's sparse PolyElement.

    Integer bases use ZZ, p-local and rational bases QQ (p-integrality of
    the p-local case is enforced on coercion and division), and a sympy
    fraction-field base is used as the coefficient domain directly.
    """

    def __init__(self, descriptor, variables: Sequence[str], domain, p: Optional[int] = None,
                 rational: bool = False):
        super().__init__(descriptor)
        self.poly_ring, *gens = sympy_ring(list(variables), domain)
        self.variables = tuple(variables)
        self._gens = dict(zip(self.variables, gens))
        self.p = p
        self._rational = rational

    def from_int(self, n):
        return self.poly_ring(int(n))

    def from_fraction(self, q):
        q = _as_fraction(q)
        if self.p is not None and q.denominator % self.p == 0:
            raise NotIntegral(f"{q} has denominator divisible by {self.p}")
        try:
            return self.poly_ring.from_expr(Rational(q.numerator, q.denominator))
        except (CoercionFailed, ValueError) as exc:
            raise NotIntegral(f"{q} is not in {self.descriptor.describe()}") from exc

    def coerce(self, x):
        if isinstance(x, PolyElement) and x.ring is not self.poly_ring:
            x = self.poly_ring.from_expr(x.as_expr())
        if isinstance(x, PolyElement):
            if self.p is not None and self._raw_valuation(x, self.p) < 0:
                raise NotIntegral(f"{x} is not {self.p}-integral")
            return x
        if isinstance(x, (int, np.integer, Fraction, Rational)):
            return super().coerce(x)
        return self.poly_ring.ground_new(self.poly_ring.domain.convert(x))

    @property
    def gens(self):
        return dict(self._gens)

    def exact_div(self, x, y):
        x, y = self.coerce(x), self.coerce(y)
        if not y:
            self._zero_divisor(x)
        try:
            q = x.exquo(y)
        except ExactQuotientFailed as exc:
            raise NotDivisible(f"{x} is not divisible by {y}") from exc
        if self.p is not None and self._raw_valuation(q, self.p) < 0:
            raise NotDivisible(f"{x}/{y} is not {self.p}-integral")
        return q

    @property
    def contains_rationals(self):
        return self._rational

    def valuation(self, x, p):
        return self._raw_valuation(self.coerce(x), p)

    def _raw_valuation(self, x: PolyElement, p: int) -> float:
        if not x:
            return math.inf
        domain = self.poly_ring.domain
        if not (domain.is_ZZ or domain.is_QQ):
            raise NotImplementedError("valuation over a fraction-field domain")
        return min(p_valuation(domain.to_sympy(c), p) for c in x.values())

    def to_text(self, x):
        return str(x)

    def random_element(self, rng):
        result = self.poly_ring.zero
        for _ in range(int(rng.integers(1, 4))):
            monomial = self.poly_ring.one
            for g in self._gens.values():
                monomial *= g ** int(rng.integers(0, 3))
            result += int(rng.integers(-5, 6)) * monomial
        return result


class SympyFractionField(Ring):
    """Fraction field of a polynomial ring, backed by sympy's FracElement."""

    def __init__(self, descriptor, variables: Sequence[str], domain):
        super().__init__(descriptor)
        self.frac_field, *gens = sympy_field(list(variables), domain)
        self._gens = dict(zip(variables, gens))

    def from_int(self, n):
        return self.frac_field(int(n))

    def from_fraction(self, q):
        q = _as_fraction(q)
        return self.frac_field.from_expr(Rational(q.numerator, q.denominator))

    @property
    def gens(self):
        return dict(self._gens)

    def exact_div(self, x, y):
        x, y = self.coerce(x), self.coerce(y)
        if not y:
            self._zero_divisor(x)
        return x / y

    @property
    def contains_rationals(self):
        return True

    def random_element(self, rng):
        num = self.frac_field(int(rng.integers(-5, 6)))
        den = self.frac_field.one
        for g in self._gens.values():
            num += int(rng.integers(-3, 4)) * g
            den *= g ** int(rng.integers(0, 2))
        return num / den


class LaurentElement:
    """Element of a polynomial ring with some generators inverted."""

    __slots__ = ("ring", "poly")

    def __init__(self, ring: "LocalizedRing", poly: PolyElement):
        self.ring = ring
        self.poly = poly

    def _other(self, other):
        if isinstance(other, LaurentElement):
            return other.poly if other.ring is self.ring else None
        try:
            return self.ring.coerce(other).poly
        except (TypeError, CoercionFailed):
            return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return LaurentElement(self.ring, self.poly + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return LaurentElement(self.ring, self.poly - o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return LaurentElement(self.ring, o - self.poly)

    def __neg__(self):
        return LaurentElement(self.ring, -self.poly)

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return LaurentElement(self.ring, self.ring.normalize(self.poly * o))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.ring.exact_div(self.ring.one, self) ** (-e)
        result, base = self.ring.one, self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.poly == o

    def __hash__(self):
        return hash(self.poly)

    def __bool__(self):
        return bool(self.poly)

    def __repr__(self):
        return self.ring.to_text(self)


class LocalizedRing(Ring):
    """
    R[x_1^-1, ..., x_k^-1] for a polynomial ring R over Q or Z_(p).

    Each inverted generator x gets a partner generator x^-1; the normal
    form never contains both in one monomial, which makes it unique.
    """

    def __init__(self, descriptor, base: SympyPolynomialRing, inverted: Sequence[str]):
        super().__init__(descriptor)
        self.base = base
        self.inverted = tuple(inverted)
        names = list(base.variables) + [f"{n}_inv" for n in self.inverted]
        self.poly_ring, *gens = sympy_ring(names, QQ)
        self._gens = dict(zip(base.variables, gens))
        self._pairs = [(names.index(n), names.index(f"{n}_inv")) for n in self.inverted]
        self._inverse = {n: gens[names.index(f"{n}_inv")] for n in self.inverted}
        self.p = base.p

    def normalize(self, poly: PolyElement) -> PolyElement:
        if not any(m[i] and m[j] for m in poly.keys() for i, j in self._pairs):
            return poly
        terms: Dict[Tuple[int, ...], Any] = {}
        for monom, coeff in poly.items():
            m = list(monom)
            for i, j in self._pairs:
                k = min(m[i], m[j])
                m[i] -= k
                m[j] -= k
            key = tuple(m)
            terms[key] = terms.get(key, self.poly_ring.domain.zero) + coeff
        return self.poly_ring.from_dict({k: c for k, c in terms.items() if c})

    def _wrap(self, poly) -> LaurentElement:
        return LaurentElement(self, poly)

    def from_int(self, n):
        return self._wrap(self.poly_ring(int(n)))

    def from_fraction(self, q):
        q = _as_fraction(q)
        if self.p is not None and q.denominator % self.p == 0:
            raise NotIntegral(f"{q} has denominator divisible by {self.p}")
        return self._wrap(self.poly_ring.from_expr(Rational(q.numerator, q.denominator)))

    def coerce(self, x):
        if isinstance(x, LaurentElement):
            if x.ring is not self:
                raise TypeError(f"element of {x.ring} used in {self}")
            return x
        if isinstance(x, PolyElement):
            return self._wrap(self.normalize(self.poly_ring.from_expr(x.as_expr())))
        return super().coerce(x)

    @property
    def gens(self):
        return {n: self._wrap(g) for n, g in self._gens.items()}

    def inverse_gen(self, name: str) -> LaurentElement:
        return self._wrap(self._inverse[name])

    def exact_div(self, x, y):
        x, y = self.coerce(x), self.coerce(y)
        if not y:
            self._zero_divisor(x)
        if len(y.poly) != 1:
            raise NotDivisible(f"only monomial divisors are supported, got {self.to_text(y)}")
        (monom, coeff), = y.poly.items()
        names = list(self.base.variables) + [f"{n}_inv" for n in self.inverted]
        inverse = self.poly_ring.one
        for name, e in zip(names, monom):
            if not e:
                continue
            if name.endswith("_inv"):
                inverse *= self._gens[name[:-4]] ** e
            elif name in self._inverse:
                inverse *= self._inverse[name] ** e
            else:
                raise NotDivisible(f"{name} is not invertible in {self.descriptor.describe()}")
        c = _as_fraction(self.poly_ring.domain.to_sympy(coeff))
        if self.p is not None and p_valuation(c, self.p) > 0:
            raise NotDivisible(f"{c} is not a unit in Z_({self.p})")
        return x * self._wrap(inverse * self.poly_ring.domain.from_sympy(Rational(c.denominator, c.numerator)))

    @property
    def contains_rationals(self):
        return self.base.contains_rationals

    def valuation(self, x, p):
        x = self.coerce(x)
        if not x.poly:
            return math.inf
        return min(p_valuation(self.poly_ring.domain.to_sympy(c), p) for c in x.poly.values())

    def to_text(self, x):
        return str(self.coerce(x).poly)

    def random_element(self, rng):
        return self.coerce(self.base.random_element(rng))


def _scalar_descriptor_ring(descriptor: RingDescriptor) -> Tuple[Any, Optional[int], bool]:
    """sympy domain, p-local prime and rational flag for a polynomial coefficient base."""
    if descriptor.kind == INTEGERS:
        return ZZ, None, False
    if descriptor.kind == P_LOCAL:
        return QQ, descriptor.p, False
    if descriptor.kind == FRACTION and descriptor.base.kind in (INTEGERS, P_LOCAL):
        return QQ, None, True
    if descriptor.kind == FRACTION and descriptor.base.kind == POLYNOMIAL:
        inner = make_ring(descriptor)
        return inner.frac_field.to_domain(), None, True
    raise InvalidDescriptor(f"polynomials over {descriptor.describe()} are not supported")


@lru_cache(maxsize=None)
def _rational_cyclotomic(p: int, l: int) -> CyclotomicRing:
    return make_ring(RingDescriptor.fraction(RingDescriptor.cyclotomic_lift(p, l)))


@lru_cache(maxsize=None)
def make_ring(descriptor: RingDescriptor) -> Ring:
    """Materialise a descriptor; equal descriptors share one handle."""
    kind = descriptor.kind
    logger.debug("building ring %s", descriptor.describe())
    if kind == INTEGERS:
        return IntegerRing(descriptor)
    if kind == P_LOCAL:
        return PLocalRing(descriptor)
    if kind == MODULAR:
        return ModularRing(descriptor)
    if kind == CYCLOTOMIC_QUOTIENT:
        scalars = make_ring(RingDescriptor.modular(descriptor.p ** descriptor.l))
        return CyclotomicRing(descriptor, descriptor.p, descriptor.l, scalars)
    if kind == CYCLOTOMIC_LIFT:
        scalars = make_ring(RingDescriptor.p_local(descriptor.p))
        return CyclotomicRing(descriptor, descriptor.p, descriptor.l, scalars)

    base = descriptor.base
    if kind == FRACTION:
        if base.kind in (INTEGERS, P_LOCAL):
            return RationalField(descriptor)
        if base.kind == CYCLOTOMIC_LIFT:
            scalars = make_ring(RingDescriptor.fraction(RingDescriptor.integers()))
            return CyclotomicRing(descriptor, base.p, base.l, scalars)
        if base.kind == POLYNOMIAL:
            domain, _, _ = _scalar_descriptor_ring(base.base)
            return SympyFractionField(descriptor, base.variables, domain.get_field())
        if base.kind == FRACTION:
            return make_ring(base)
        raise InvalidDescriptor(f"no fraction field for {base.describe()}")

    if kind == POLYNOMIAL:
        if base.kind in (CYCLOTOMIC_LIFT, FRACTION) and (
                base.kind == CYCLOTOMIC_LIFT or base.base.kind == CYCLOTOMIC_LIFT):
            lift = base if base.kind == CYCLOTOMIC_LIFT else base.base
            coefficient_base = (RingDescriptor.p_local(lift.p) if base.kind == CYCLOTOMIC_LIFT
                                else RingDescriptor.fraction(RingDescriptor.integers()))
            scalars = make_ring(RingDescriptor.polynomial(coefficient_base, descriptor.variables))
            return CyclotomicRing(descriptor, lift.p, lift.l, scalars)
        if base.kind == POLYNOMIAL:
            merged = RingDescriptor.polynomial(base.base, base.variables + descriptor.variables)
            return make_ring(merged)
        domain, p, rational = _scalar_descriptor_ring(base)
        return SympyPolynomialRing(descriptor, descriptor.variables, domain, p=p, rational=rational)

    if kind == LOCALIZATION:
        inner = make_ring(base)
        if not isinstance(inner, SympyPolynomialRing) or not (
                inner.poly_ring.domain.is_QQ or inner.poly_ring.domain.is_ZZ):
            raise InvalidDescriptor(f"cannot localize {base.describe()}")
        return LocalizedRing(descriptor, inner, descriptor.inverted)
    raise InvalidDescriptor(f"unhandled ring kind {kind!r}")


def enumerate_elements(ring: Ring) -> List:
    """All elements of a finite ring, each exactly once, in a fixed order."""
    if not ring.is_finite:
        raise NotFinite(f"{ring.descriptor.describe()} is infinite")
    return list(ring.elements())


def declared_lift(ring: Ring) -> Ring:
    """The p-torsion-free ring a finite quotient lifts to."""
    d = ring.descriptor
    if d.kind == MODULAR:
        return make_ring(RingDescriptor.integers())
    if d.kind == CYCLOTOMIC_QUOTIENT:
        return make_ring(RingDescriptor.cyclotomic_lift(d.p, d.l))
    raise NoLiftDeclared(f"{d.describe()} has no declared lift")


def _reduce_rational(q, modulus: int) -> int:
    q = _as_fraction(q)
    if math.gcd(q.denominator, modulus) != 1:
        raise NotDivisible(f"denominator {q.denominator} is not invertible mod {modulus}")
    return q.numerator * pow(q.denominator, -1, modulus) % modulus


def reduce(x, target: Ring):
    """
    Image of a lift element in its quotient: integers and p-local
    rationals into Z/N, cyclotomic lift elements into the cyclotomic
    quotient with the same p and l.
    """
    d = target.descriptor
    if d.kind == MODULAR:
        if isinstance(x, CyclotomicElement):
            raise NoLiftDeclared(f"{x.ring.descriptor.describe()} does not reduce to {d.describe()}")
        return Residue(_reduce_rational(x, d.modulus), d.modulus)
    if d.kind == CYCLOTOMIC_QUOTIENT:
        modulus = d.p ** d.l
        if isinstance(x, CyclotomicElement):
            sd = x.ring.descriptor
            lift_kind = sd.kind if sd.kind != FRACTION else sd.base.kind
            base = sd if sd.kind != FRACTION else sd.base
            if lift_kind != CYCLOTOMIC_LIFT or (base.p, base.l) != (d.p, d.l):
                raise NoLiftDeclared(f"{sd.describe()} does not reduce to {d.describe()}")
            return target._make(_reduce_rational(_rational_constant(c), modulus)
                                for c in x.coeffs)
        return target.from_int(_reduce_rational(x, modulus))
    raise NoLiftDeclared(f"{d.describe()} is not a declared quotient")


def lift(y, ring: Ring):
    """Canonical preimage of y with coordinates in [0, N)."""
    target = declared_lift(ring)
    y = ring.coerce(y)
    if isinstance(y, Residue):
        return y.value
    return target._make(Fraction(c.value) for c in y.coeffs)


def parse_element(text: str, ring: Ring):
    """Parse an integer or a polynomial in zeta (e.g. "1 - zeta") into ring."""
    zeta = sympy.Symbol("zeta")
    try:
        expr = sympy.sympify(str(text), locals={"zeta": zeta})
    except (sympy.SympifyError, TypeError) as exc:
        raise InvalidDescriptor(f"cannot parse element {text!r}") from exc
    if expr.free_symbols - {zeta}:
        raise InvalidDescriptor(f"unknown symbols in {text!r}")
    if zeta in expr.free_symbols:
        if not isinstance(ring, CyclotomicRing):
            raise InvalidDescriptor(f"zeta is not defined in {ring.descriptor.describe()}")
        poly = sympy.Poly(expr, zeta)
        coeffs = [_as_fraction(c) for c in reversed(poly.all_coeffs())]
        return ring.from_coefficients([_scalar_from_fraction(ring.scalars, c) for c in coeffs])
    value = sympy.Rational(expr)
    return ring.from_fraction(Fraction(int(value.p), int(value.q)))


@dataclass
class CayleyTables:
    """Index-level addition, multiplication and negation of a finite ring."""
    ring: Ring
    elements: List
    add: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    index: Dict = dc_field(repr=False)

    @property
    def zero_index(self) -> int:
        return self.index[self.ring.zero]

    def index_of(self, x) -> int:
        return self.index[self.ring.coerce(x)]

    def int_index(self, n: int) -> int:
        return self.index_of(self.ring.from_int(n))


@lru_cache(maxsize=None)
def cayley_tables(ring: Ring) -> CayleyTables:
    elements = enumerate_elements(ring)
    size = len(elements)
    if size > MAX_TABLE_SIZE:
        raise NotFinite(f"{ring.descriptor.describe()} has {size} elements; tables are capped "
                        f"at {MAX_TABLE_SIZE}")
    index = {x: i for i, x in enumerate(elements)}
    add = np.empty((size, size), dtype=np.int64)
    mul = np.empty((size, size), dtype=np.int64)
    neg = np.empty(size, dtype=np.int64)
    for i, x in enumerate(elements):
        neg[i] = index[-x]
        for j, y in enumerate(elements):
            add[i, j] = index[x + y]
            mul[i, j] = index[x * y]
    logger.debug("cayley tables for %s: %d elements", ring.descriptor.describe(), size)
    return CayleyTables(ring, elements, add, mul, neg, index)


def embed(x, target: Ring):
    """Move x into target; cyclotomic elements keep their coordinates."""
    if isinstance(x, CyclotomicElement) and isinstance(target, CyclotomicRing) and x.ring is not target:
        if (x.ring.p, x.ring.l) != (target.p, target.l):
            raise RingMismatch(f"cannot embed {x.ring.descriptor.describe()} "
                               f"into {target.descriptor.describe()}")
        return target._make(x.coeffs)
    if isinstance(x, LaurentElement) and x.ring is not target:
        return target.coerce(x.poly)
    return target.coerce(x)


def p_local_hull(ring: Ring, p: int) -> Ring:
    """Smallest ring of the tower containing ring in which primes other than p are units."""
    d = ring.descriptor
    if d.kind == INTEGERS:
        return make_ring(RingDescriptor.p_local(p))
    if d.kind == POLYNOMIAL and d.base.kind == INTEGERS:
        return make_ring(RingDescriptor.polynomial(RingDescriptor.p_local(p), d.variables))
    return ring


def evaluate_polynomial(poly: PolyElement, values: Sequence, ring: Ring,
                        powers: Optional[Dict[Tuple[int, int], Any]] = None):
    """
    Substitute ring elements for the generators of a sympy polynomial over
    ZZ or QQ.  powers is an optional cache shared across calls with the
    same values.
    """
    if powers is None:
        powers = {}
    domain = poly.ring.domain
    total = ring.zero
    for monom, coeff in poly.terms():
        if domain.is_ZZ:
            term = ring.from_int(int(coeff))
        else:
            term = ring.from_fraction(Fraction(int(coeff.numerator), int(coeff.denominator)))
        for i, e in enumerate(monom):
            if not e:
                continue
            pw = powers.get((i, e))
            if pw is None:
                pw = powers[(i, e)] = values[i] ** e
            term = term * pw
        total = total + term
    return total

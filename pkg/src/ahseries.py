"""
Deformed Artin-Hasse Series
Truncated formal power series in up to three variables and the deformed
exponentials built from them: E_p(X), E_p(U, lam; X), E_p(v, lam; X),
the symmetric cocycle F_p(v, lam; X, Y) and the twisted series
E~_p(W, lam2; E) and G_p(W, lam2; E).

Every deformed series is a product of powers (1 + c T)^(e / c), so its
logarithm is a linear combination of log(1 + c T) / c.  That quotient is
a polynomial in c, which keeps every construction valid for c = 0 or c
nilpotent.  Identities between such series are compared through their
logarithms; log is injective on series with constant term 1 over a
Q-algebra.
"""
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import (BadConstantTerm, IntegralityViolation, MismatchWithClosedForm,
                     NonRationalCoefficients, NotIntegral, RingMismatch)
from .exactring import (Ring, RingDescriptor, embed, evaluate_polynomial,
                        make_ring, p_local_hull)
from .wittcore import WittVector, f_lambda, ghost, symbolic_vector, t_a

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]

_PLAIN_NUMBER = re.compile(r"-?\d+")


def _multiply(a: Dict[Monomial, Any], b: Dict[Monomial, Any], order: int) -> Dict[Monomial, Any]:
    out: Dict[Monomial, Any] = {}
    b_items = [(eb, sum(eb), cb) for eb, cb in b.items()]
    for ea, ca in a.items():
        da = sum(ea)
        for eb, db, cb in b_items:
            if da + db > order:
                continue
            key = tuple(x + y for x, y in zip(ea, eb))
            prod = ca * cb
            out[key] = out[key] + prod if key in out else prod
    return out


def _accumulate(acc: Dict[Monomial, Any], terms: Dict[Monomial, Any], negate: bool = False):
    for e, c in terms.items():
        if negate:
            c = -c
        acc[e] = acc[e] + c if e in acc else c


def _sort_key(e: Monomial):
    return (sum(e), tuple(-x for x in e))


class TruncatedPowerSeries:
    """
    Series in 1 to 3 variables over a ring of the tower, truncated by
    total degree: coefficients through degree `order` are kept.
    """

    __slots__ = ("ring", "variables", "order", "coeffs")

    def __init__(self, ring: Ring, variables: Sequence[str], order: int,
                 coeffs: Optional[Mapping[Sequence[int], Any]] = None):
        variables = tuple(variables)
        if not 1 <= len(variables) <= 3:
            raise ValueError(f"series take 1 to 3 variables, got {variables}")
        if order < 0:
            raise ValueError("order must be non-negative")
        self.ring = ring
        self.variables = variables
        self.order = order
        self.coeffs: Dict[Monomial, Any] = {}
        for exps, c in (coeffs or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(variables):
                raise ValueError(f"exponent {exps} does not match variables {variables}")
            if sum(exps) > order:
                continue
            c = ring.coerce(c)
            if not ring.is_zero(c):
                self.coeffs[exps] = c

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, ring: Ring, variables: Sequence[str], order: int) -> "TruncatedPowerSeries":
        return cls(ring, variables, order)

    @classmethod
    def constant(cls, ring: Ring, variables: Sequence[str], order: int, c) -> "TruncatedPowerSeries":
        return cls(ring, variables, order, {(0,) * len(tuple(variables)): c})

    @classmethod
    def one(cls, ring: Ring, variables: Sequence[str], order: int) -> "TruncatedPowerSeries":
        return cls.constant(ring, variables, order, ring.one)

    @classmethod
    def variable(cls, ring: Ring, variables: Sequence[str], order: int,
                 name: Optional[str] = None) -> "TruncatedPowerSeries":
        variables = tuple(variables)
        index = variables.index(name) if name is not None else 0
        exps = [0] * len(variables)
        exps[index] = 1
        return cls(ring, variables, order, {tuple(exps): ring.one})

    def _wrap(self, coeffs: Dict[Monomial, Any], order: Optional[int] = None) -> "TruncatedPowerSeries":
        out = TruncatedPowerSeries.__new__(TruncatedPowerSeries)
        out.ring = self.ring
        out.variables = self.variables
        out.order = self.order if order is None else order
        is_zero = self.ring.is_zero
        out.coeffs = {e: c for e, c in coeffs.items() if sum(e) <= out.order and not is_zero(c)}
        return out

    # -- access -----------------------------------------------------------

    def coefficient(self, *exps: int):
        return self.coeffs.get(tuple(exps), self.ring.zero)

    @property
    def constant_term(self):
        return self.coefficient(*([0] * len(self.variables)))

    def valuation_degree(self) -> int:
        """Smallest total degree with a nonzero coefficient; order + 1 for zero."""
        return min((sum(e) for e in self.coeffs), default=self.order + 1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def truncate(self, order: int) -> "TruncatedPowerSeries":
        return self._wrap(dict(self.coeffs), min(order, self.order))

    # -- arithmetic -------------------------------------------------------

    def _operand(self, other) -> "TruncatedPowerSeries":
        if isinstance(other, TruncatedPowerSeries):
            if other.ring is not self.ring:
                raise RingMismatch(f"series over {self.ring} and {other.ring}")
            if other.variables != self.variables:
                raise RingMismatch(f"series in {self.variables} and {other.variables}")
            return other
        return TruncatedPowerSeries.constant(self.ring, self.variables, self.order, other)

    def __add__(self, other):
        other = self._operand(other)
        out = dict(self.coeffs)
        _accumulate(out, other.coeffs)
        return self._wrap(out, min(self.order, other.order))

    __radd__ = __add__

    def __neg__(self):
        return self._wrap({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._operand(other)
        out = dict(self.coeffs)
        _accumulate(out, other.coeffs, negate=True)
        return self._wrap(out, min(self.order, other.order))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedPowerSeries):
            c = self.ring.coerce(other)
            return self._wrap({e: v * c for e, v in self.coeffs.items()})
        other = self._operand(other)
        order = min(self.order, other.order)
        return self._wrap(_multiply(self.coeffs, other.coeffs, order), order)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers need reciprocal()")
        result = TruncatedPowerSeries.one(self.ring, self.variables, self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def first_difference(self, other: "TruncatedPowerSeries") -> Optional[Tuple[Monomial, Any, Any]]:
        """Smallest monomial (by degree, then exponents) where two series differ."""
        order = min(self.order, other.order)
        zero = self.ring.zero
        keys = {e for e in set(self.coeffs) | set(other.coeffs) if sum(e) <= order}
        for e in sorted(keys, key=_sort_key):
            a, b = self.coeffs.get(e, zero), other.coeffs.get(e, zero)
            if not self.ring.is_zero(a - b):
                return e, a, b
        return None

    def __eq__(self, other):
        if not isinstance(other, TruncatedPowerSeries):
            return NotImplemented
        return self.variables == other.variables and self.first_difference(other) is None

    __hash__ = None

    # -- substitution -----------------------------------------------------

    def compose(self, substitutions: Mapping[str, "TruncatedPowerSeries"]) -> "TruncatedPowerSeries":
        """Substitute a series with zero constant term for every variable."""
        try:
            inner = [substitutions[v] for v in self.variables]
        except KeyError as exc:
            raise ValueError(f"no substitution for variable {exc.args[0]}") from None
        ref = inner[0]
        for s in inner:
            if s.ring is not ref.ring or s.variables != ref.variables:
                raise RingMismatch("substituted series must share ring and variables")
            if not s.ring.is_zero(s.constant_term):
                raise BadConstantTerm("compose needs inner series with constant term 0")
        order = min(s.order for s in inner)
        vals = [s.valuation_degree() for s in inner]
        powers: Dict[Tuple[int, int], TruncatedPowerSeries] = {}

        def power(i: int, e: int) -> TruncatedPowerSeries:
            key = (i, e)
            if key not in powers:
                powers[key] = inner[i] if e == 1 else power(i, e - 1) * inner[i]
            return powers[key]

        result: Dict[Monomial, Any] = {}
        target = ref.ring
        for exps, c in self.coeffs.items():
            if sum(v * e for v, e in zip(vals, exps)) > order:
                continue
            c = c if target is self.ring else embed(c, target)
            term: Optional[TruncatedPowerSeries] = None
            for i, e in enumerate(exps):
                if e:
                    term = power(i, e) if term is None else term * power(i, e)
            if term is None:
                _accumulate(result, {(0,) * len(ref.variables): c})
            else:
                _accumulate(result, (term * c).coeffs)
        return ref._wrap(result, order)

    def inflate(self, step: int, order: Optional[int] = None) -> "TruncatedPowerSeries":
        """Substitute X_i -> X_i^step in every variable."""
        order = self.order * step if order is None else order
        return self._wrap({tuple(x * step for x in e): c for e, c in self.coeffs.items()}, order)

    def swap(self, i: int = 0, j: int = 1) -> "TruncatedPowerSeries":
        def swapped(e):
            e = list(e)
            e[i], e[j] = e[j], e[i]
            return tuple(e)
        return self._wrap({swapped(e): c for e, c in self.coeffs.items()})

    def map_coefficients(self, fn: Callable[[Any], Any], ring: Ring) -> "TruncatedPowerSeries":
        return TruncatedPowerSeries(ring, self.variables, self.order,
                                    {e: fn(c) for e, c in self.coeffs.items()})

    # -- exp, log, reciprocal -------------------------------------------

    def _graded(self) -> List[Dict[Monomial, Any]]:
        parts: List[Dict[Monomial, Any]] = [dict() for _ in range(self.order + 1)]
        for e, c in self.coeffs.items():
            parts[sum(e)][e] = c
        return parts

    def _require_rationals(self, operation: str):
        if not self.ring.contains_rationals:
            raise NonRationalCoefficients(
                f"{operation} needs rational coefficients, {self.ring.descriptor.describe()} has none")

    def _merge(self, parts: List[Dict[Monomial, Any]]) -> "TruncatedPowerSeries":
        out: Dict[Monomial, Any] = {}
        for part in parts:
            out.update(part)
        return self._wrap(out)

    def reciprocal(self) -> "TruncatedPowerSeries":
        if self.constant_term != 1:
            raise BadConstantTerm("reciprocal needs constant term 1")
        f = self._graded()
        zero_exps = (0,) * len(self.variables)
        g = [{zero_exps: self.ring.one}]
        for n in range(1, self.order + 1):
            acc: Dict[Monomial, Any] = {}
            for k in range(1, n + 1):
                if f[k] and g[n - k]:
                    _accumulate(acc, _multiply(f[k], g[n - k], self.order), negate=True)
            g.append(acc)
        return self._merge(g)

    def exp(self) -> "TruncatedPowerSeries":
        # n g_n = sum_k k f_k g_(n-k) on homogeneous components
        self._require_rationals("exp")
        if not self.ring.is_zero(self.constant_term):
            raise BadConstantTerm("exp needs constant term 0")
        ring = self.ring
        f = self._graded()
        kf = [{e: c * ring.from_int(k) for e, c in part.items()} for k, part in enumerate(f)]
        g = [{(0,) * len(self.variables): ring.one}]
        for n in range(1, self.order + 1):
            acc: Dict[Monomial, Any] = {}
            for k in range(1, n + 1):
                if kf[k] and g[n - k]:
                    _accumulate(acc, _multiply(kf[k], g[n - k], self.order))
            inv = ring.from_fraction(Fraction(1, n))
            g.append({e: c * inv for e, c in acc.items()})
        return self._merge(g)

    def log(self) -> "TruncatedPowerSeries":
        # n h_n = n f_n - sum_{k<n} k h_k f_(n-k)
        self._require_rationals("log")
        if self.constant_term != 1:
            raise BadConstantTerm("log needs constant term 1")
        ring = self.ring
        f = self._graded()
        h: List[Dict[Monomial, Any]] = [{}]
        kh: List[Dict[Monomial, Any]] = [{}]
        for n in range(1, self.order + 1):
            acc = {e: c * ring.from_int(n) for e, c in f[n].items()}
            for k in range(1, n):
                if kh[k] and f[n - k]:
                    _accumulate(acc, _multiply(kh[k], f[n - k], self.order), negate=True)
            inv = ring.from_fraction(Fraction(1, n))
            h.append({e: c * inv for e, c in acc.items()})
            kh.append({e: c * ring.from_int(n) for e, c in h[n].items()})
        return self._merge(h)

    def power(self, t) -> "TruncatedPowerSeries":
        """self^t := exp(t log self) for a scalar t of the coefficient ring."""
        return (self.log() * t).exp()

    # -- text -------------------------------------------------------------

    def _monomial_text(self, e: Monomial) -> str:
        parts = []
        for name, k in zip(self.variables, e):
            if k:
                parts.append(name if k == 1 else f"{name}^{k}")
        return "*".join(parts)

    def to_text(self) -> str:
        """Canonical text: terms by total degree, then by descending exponents."""
        if not self.coeffs:
            return "0"
        terms = []
        for e in sorted(self.coeffs, key=_sort_key):
            coeff = self.ring.to_text(self.coeffs[e])
            mono = self._monomial_text(e)
            if not mono:
                terms.append(coeff)
            elif coeff == "1":
                terms.append(mono)
            elif coeff == "-1":
                terms.append(f"-{mono}")
            elif _PLAIN_NUMBER.fullmatch(coeff):
                terms.append(f"{coeff}*{mono}")
            else:
                terms.append(f"({coeff})*{mono}")
        return " + ".join(terms)

    def __repr__(self):
        return f"{self.to_text()} + O(deg {self.order + 1})"


Series = TruncatedPowerSeries


# -- building blocks ---------------------------------------------------------

def truncation_depth(p: int, order: int) -> int:
    """Largest k with p^k <= order; factors beyond it start above the order."""
    k = 0
    while p ** (k + 1) <= order:
        k += 1
    return k


def rational_polynomial_ring(names: Sequence[str]) -> Ring:
    return make_ring(RingDescriptor.polynomial(RingDescriptor.fraction(RingDescriptor.integers()),
                                               list(names)))


def scaled_log(c, t: Series) -> Series:
    """log(1 + c t) / c, expanded as a polynomial in c; t needs constant term 0."""
    t._require_rationals("scaled_log")
    ring = t.ring
    if not ring.is_zero(t.constant_term):
        raise BadConstantTerm("scaled_log needs constant term 0")
    c = ring.coerce(c)
    result = Series.zero(ring, t.variables, t.order)
    power, c_power, n = t, ring.one, 1
    while not power.is_zero():
        result = result + power * (c_power * ring.from_fraction(Fraction((-1) ** (n + 1), n)))
        n += 1
        power = power * t
        c_power = c_power * c
    return result


def inflated_log(ring: Ring, c, order: int, step: int, variables: Sequence[str] = ("X",),
                 index: int = 0) -> Series:
    """log(1 + c Y^step) / c in the variable at position index."""
    c = ring.coerce(c)
    coeffs = {}
    c_power = ring.one
    n = 1
    while n * step <= order:
        exps = [0] * len(tuple(variables))
        exps[index] = n * step
        coeffs[tuple(exps)] = c_power * ring.from_fraction(Fraction((-1) ** (n + 1), n))
        c_power = c_power * c
        n += 1
    return Series(ring, variables, order, coeffs)


@dataclass(frozen=True)
class DeformedExpParams:
    """
    Parameters (p, lam, v, N) of E_p(v, lam; X).  v is read as the Witt
    vector (v_0, ..., v_{n-1}, 0, 0, ...).
    """
    p: int
    lam: Any
    v: WittVector
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("series order must be at least 1")
        if self.v.p != self.p:
            raise RingMismatch(f"vector for p={self.v.p} used with p={self.p}")
        object.__setattr__(self, "lam", self.v.ring.coerce(self.lam))

    @property
    def ring(self) -> Ring:
        return self.v.ring

    @property
    def depth(self) -> int:
        return truncation_depth(self.p, self.order)

    def coordinates(self, length: int) -> List:
        coords = list(self.v.coords[:length])
        return coords + [self.ring.zero] * (length - len(coords))

    def ghosts(self, count: int) -> List:
        if count == 0:
            return []
        return list(ghost(WittVector(self.p, self.ring, self.coordinates(count))).values)

    def twisted_ghosts(self) -> List:
        """Phi_{k-1}(F^(lam) v) = Phi_k(v) - lam^((p-1)p^(k-1)) Phi_{k-1}(v) for k = 1..depth."""
        K = self.depth
        phis = self.ghosts(K + 1)
        return [phis[k] - self.lam ** ((self.p - 1) * self.p ** (k - 1)) * phis[k - 1]
                for k in range(1, K + 1)]


def _two_param_log(ring: Ring, p: int, U, lam, order: int, step: int = 1) -> Series:
    """log E_p(U, lam; X^step)."""
    result = inflated_log(ring, lam, order, step) * U
    j = 1
    while step * p ** j <= order:
        hi, lo = p ** j, p ** (j - 1)
        exponent = (U ** hi - U ** lo * lam ** (hi - lo)) * ring.from_fraction(Fraction(1, hi))
        result = result + inflated_log(ring, lam ** hi, order, step * hi) * exponent
        j += 1
    return result


def _ep_log_sum(params: DeformedExpParams) -> Series:
    ring, p, lam = params.ring, params.p, params.lam
    result = inflated_log(ring, lam, params.order, 1) * params.coordinates(1)[0]
    for k, phi in enumerate(params.twisted_ghosts(), start=1):
        step = p ** k
        weight = phi * ring.from_fraction(Fraction(1, step))
        result = result + inflated_log(ring, lam ** step, params.order, step) * weight
    return result


def _ep_log_product(params: DeformedExpParams) -> Series:
    ring, p = params.ring, params.p
    result = Series.zero(ring, ("X",), params.order)
    for k, vk in enumerate(params.coordinates(params.depth + 1)):
        step = p ** k
        result = result + _two_param_log(ring, p, vk, params.lam ** step, params.order, step)
    return result


def ep_witt_log(v: WittVector, lam, order: int) -> Series:
    """log E_p(v, lam; X) over a ring containing Q, checked against the product form."""
    params = DeformedExpParams(v.p, lam, v, order)
    if not params.ring.contains_rationals:
        raise NonRationalCoefficients(
            f"log E_p needs rational coefficients, {params.ring.descriptor.describe()} has none")
    sum_form = _ep_log_sum(params)
    product_form = _ep_log_product(params)
    diff = sum_form.first_difference(product_form)
    if diff is not None:
        raise MismatchWithClosedForm(
            f"sum and product forms of log E_p disagree at X^{diff[0][0]}")
    return sum_form


def _check_p_integral(series: Series, p: int, what: str):
    for e in sorted(series.coeffs, key=_sort_key):
        if series.ring.valuation(series.coeffs[e], p) < 0:
            raise IntegralityViolation(
                f"{what}: coefficient of {series._monomial_text(e) or '1'} is not {p}-integral")


def p_integrality(series: Series, p: int) -> Optional[str]:
    """Monomial text of the first coefficient outside the p-local ring, or None."""
    try:
        _check_p_integral(series, p, "series")
    except IntegralityViolation as exc:
        return str(exc)
    return None


def specialize(series: Series, values: Sequence, target: Ring) -> Series:
    """Evaluate sympy polynomial coefficients at values (aligned with the generators) in target."""
    powers: Dict[Tuple[int, int], Any] = {}
    coeffs = {e: evaluate_polynomial(c, values, target, powers) for e, c in series.coeffs.items()}
    return Series(target, series.variables, series.order, coeffs)


@lru_cache(maxsize=None)
def universal_ep(p: int, length: int, order: int) -> Series:
    """E_p(v, lam; X) over Q[lam, v_0..v_{length-1}], verified p-integral."""
    ring = rational_polynomial_ring(["lam"] + [f"v{i}" for i in range(length)])
    v = symbolic_vector(p, ring, "v", length)
    series = ep_witt_log(v, ring.gens["lam"], order).exp()
    _check_p_integral(series, p, f"universal E_{p}")
    logger.debug("universal E_%d (length %d, order %d): %d terms", p, length, order, len(series.coeffs))
    return series


def _specialize_universal(universal: Series, params: DeformedExpParams, length: int) -> Series:
    hull = p_local_hull(params.ring, params.p)
    values = [embed(params.lam, hull)] + [embed(c, hull) for c in params.coordinates(length)]
    return specialize(universal, values, hull)


def artin_hasse(p: int, order: int) -> Series:
    """E_p(X) = exp(sum_r X^(p^r) / p^r) over the p-local rationals."""
    if order < 1:
        raise ValueError("series order must be at least 1")
    rationals = make_ring(RingDescriptor.fraction(RingDescriptor.integers()))
    log = Series(rationals, ("X",), order,
                 {(p ** r,): Fraction(1, p ** r) for r in range(truncation_depth(p, order) + 1)})
    series = log.exp()
    target = make_ring(RingDescriptor.p_local(p))
    try:
        return series.map_coefficients(target.from_fraction, target)
    except NotIntegral as exc:
        raise IntegralityViolation(f"E_{p}(X) leaves Z_({p})") from exc


def ep_two_param(p: int, order: int) -> Series:
    """
    E_p(U, lam; X) with coefficients in Z_(p)[lam, U].  The exponent
    (U/lam)^(p^k) - (U/lam)^(p^(k-1)) over p^k, times log(1 + lam^(p^k) X^(p^k)),
    only involves non-negative powers of lam, so Q[lam, U] suffices for
    the computation.
    """
    if order < 1:
        raise ValueError("series order must be at least 1")
    ring = rational_polynomial_ring(["lam", "U"])
    gens = ring.gens
    series = _two_param_log(ring, p, gens["U"], gens["lam"], order).exp()
    _check_p_integral(series, p, f"E_{p}(U, lam; X)")
    target = make_ring(RingDescriptor.polynomial(RingDescriptor.p_local(p), ["lam", "U"]))
    return series.map_coefficients(target.coerce, target)


def ep_witt(v: WittVector, lam, order: int) -> Series:
    """
    E_p(v, lam; X).  Over rings containing Q it is computed directly;
    otherwise the universal series is evaluated at (lam, v) in the
    p-localisation of v's ring.
    """
    params = DeformedExpParams(v.p, lam, v, order)
    if params.ring.contains_rationals:
        return ep_witt_log(v, lam, order).exp()
    length = params.depth + 1
    return _specialize_universal(universal_ep(v.p, length, order), params, length)


def _fp_log(params: DeformedExpParams) -> Series:
    ring, p, lam, order = params.ring, params.p, params.lam, params.order
    names = ("X", "Y")
    X = Series.variable(ring, names, order, "X")
    Y = Series.variable(ring, names, order, "Y")
    Z = X + Y + X * Y * lam
    result = Series.zero(ring, names, order)
    for k, phi in enumerate(params.ghosts(params.depth), start=1):
        step = p ** k
        c = lam ** step
        bracket = (inflated_log(ring, c, order, step, names, 0)
                   + inflated_log(ring, c, order, step, names, 1)
                   - scaled_log(c, Z ** step))
        result = result + bracket * (phi * ring.from_fraction(Fraction(1, step)))
    return result


@lru_cache(maxsize=None)
def universal_fp(p: int, length: int, order: int) -> Series:
    ring = rational_polynomial_ring(["lam"] + [f"v{i}" for i in range(length)])
    v = symbolic_vector(p, ring, "v", length)
    series = _fp_log(DeformedExpParams(p, ring.gens["lam"], v, order)).exp()
    _check_p_integral(series, p, f"universal F_{p}")
    return series


def fp_cocycle(v: WittVector, lam, order: int) -> Series:
    """F_p(v, lam; X, Y), truncated by total degree."""
    params = DeformedExpParams(v.p, lam, v, order)
    if params.ring.contains_rationals:
        return _fp_log(params).exp()
    length = params.depth
    if length == 0:
        return Series.one(p_local_hull(params.ring, v.p), ("X", "Y"), order)
    return _specialize_universal(universal_fp(v.p, length, order), params, length)


# -- the twisted series E~_p and G_p ------------------------------------------

@dataclass
class FrobeniusFamily:
    """E = E_p(U, lam1; X) with its twists E^(p^r) = E_p(U^(p^r), lam1^(p^r); X^(p^r))."""
    U: WittVector
    lam1: Any
    order: int
    _logs: Dict[int, Series] = field(default_factory=dict, repr=False)
    _series: Dict[int, Series] = field(default_factory=dict, repr=False)

    @property
    def p(self) -> int:
        return self.U.p

    @property
    def ring(self) -> Ring:
        return self.U.ring

    def log_twist(self, r: int) -> Series:
        if r not in self._logs:
            step = self.p ** r
            if step > self.order:
                self._logs[r] = Series.zero(self.ring, ("X",), self.order)
            else:
                twisted = WittVector(self.p, self.ring, [c ** step for c in self.U.coords])
                inner = ep_witt_log(twisted, self.ring.coerce(self.lam1) ** step, self.order // step)
                self._logs[r] = inner.inflate(step, self.order)
        return self._logs[r]

    def series(self, r: int = 0) -> Series:
        if r not in self._series:
            self._series[r] = self.log_twist(r).exp()
        return self._series[r]


def ep_tilde_log(W: WittVector, lam2, family: FrobeniusFamily) -> Series:
    ring, p = family.ring, family.p
    if W.ring is not ring:
        raise RingMismatch("W and the family must share a ring")
    base = family.log_twist(0)
    if not ring.is_zero(base.constant_term):
        raise BadConstantTerm("E must have constant term 1")
    params = DeformedExpParams(p, lam2, W, family.order)
    lam2 = params.lam
    result = base * ring.exact_div(params.coordinates(1)[0], lam2)
    for r, phi in enumerate(params.twisted_ghosts(), start=1):
        step = p ** r
        weight = ring.exact_div(phi, ring.from_int(step) * lam2 ** step)
        result = result + family.log_twist(r) * weight
    return result


def ep_tilde(W: WittVector, lam2, family: FrobeniusFamily) -> Series:
    """E~_p(W, lam2; E) = E^(W_0/lam2) prod_r (E^(p^r))^(Phi_{r-1}(F^(lam2) W) / (p^r lam2^(p^r)))."""
    return ep_tilde_log(W, lam2, family).exp()


def gp_series_log(W: WittVector, lam2, family: FrobeniusFamily) -> Series:
    ring, p = family.ring, family.p
    if W.ring is not ring:
        raise RingMismatch("W and the family must share a ring")
    params = DeformedExpParams(p, lam2, W, family.order)
    lam2 = params.lam
    D = family.series(0) - 1
    result = Series.zero(ring, ("X",), family.order)
    for l, phi in enumerate(params.ghosts(params.depth), start=1):
        step = p ** l
        bracket = scaled_log(ring.one, D ** step) - family.log_twist(l)
        result = result + bracket * ring.exact_div(phi, ring.from_int(step) * lam2 ** step)
    return result


def gp_series(W: WittVector, lam2, family: FrobeniusFamily) -> Series:
    """G_p(W, lam2; E) = prod_l ((1 + (E-1)^(p^l)) / E^(p^l))^(Phi_{l-1}(W) / (p^l lam2^(p^l)))."""
    return gp_series_log(W, lam2, family).exp()


# -- identity checks ------------------------------------------------------------

@dataclass(frozen=True)
class SeriesComparison:
    identity: str
    order: int
    holds: bool
    mismatch: Optional[Dict[str, str]] = None

    def evidence(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"identity": self.identity, "order": self.order, "holds": self.holds}
        if self.mismatch is not None:
            out["first_mismatch"] = dict(self.mismatch)
        return out


def compare_series(identity: str, lhs: Series, rhs: Series) -> SeriesComparison:
    diff = lhs.first_difference(rhs)
    order = min(lhs.order, rhs.order)
    if diff is None:
        return SeriesComparison(identity, order, True)
    e, a, b = diff
    mismatch = {"monomial": lhs._monomial_text(e) or "1",
                "lhs": lhs.ring.to_text(a), "rhs": rhs.ring.to_text(b)}
    logger.info("%s fails at %s", identity, mismatch["monomial"])
    return SeriesComparison(identity, order, False, mismatch)


@dataclass
class SymbolicDeformation:
    """Symbolic U, W of equal length over Q[lam1, lam2, U, W][1/lam2]."""
    p: int
    order: int
    ring: Ring
    lam1: Any
    lam2: Any
    U: WittVector
    W: WittVector
    family: FrobeniusFamily

    @property
    def lam2_inverse(self):
        return self.ring.inverse_gen("lam2")

    def scaled_u(self) -> WittVector:
        """V = U / lam2, coordinatewise."""
        inv = self.lam2_inverse
        return WittVector(self.p, self.ring, [u * inv for u in self.U.coords])

    def shifted_log(self) -> Series:
        """log E_p(W, lam2; (E - 1)/lam2) through series composition."""
        inner = ep_witt_log(self.W, self.lam2, self.order)
        argument = (self.family.series(0) - 1) * self.lam2_inverse
        return inner.compose({"X": argument})


def symbolic_deformation(p: int, length: int, order: int) -> SymbolicDeformation:
    n = max(length, truncation_depth(p, order) + 1)
    names = ["lam1", "lam2"] + [f"U{i}" for i in range(n)] + [f"W{i}" for i in range(n)]
    base = RingDescriptor.polynomial(RingDescriptor.fraction(RingDescriptor.integers()), names)
    ring = make_ring(RingDescriptor.localization(base, ["lam2"]))
    gens = ring.gens
    U = symbolic_vector(p, ring, "U", n)
    W = symbolic_vector(p, ring, "W", n)
    family = FrobeniusFamily(U, gens["lam1"], order)
    return SymbolicDeformation(p, order, ring, gens["lam1"], gens["lam2"], U, W, family)


def verify_quotient_identity(p: int, length: int, order: int) -> SeriesComparison:
    """F_p(F^(lam) v, lam; X, Y) = E(X) E(Y) / E(X + Y + lam XY), E = E_p(v, lam; -)."""
    n = max(length, truncation_depth(p, order) + 1)
    ring = rational_polynomial_ring(["lam"] + [f"v{i}" for i in range(n)])
    lam = ring.gens["lam"]
    v = symbolic_vector(p, ring, "v", n)
    lhs = fp_cocycle(f_lambda(v, lam), lam, order)
    E = ep_witt(v, lam, order)
    names = ("X", "Y")
    X = Series.variable(ring, names, order, "X")
    Y = Series.variable(ring, names, order, "Y")
    rhs = (E.compose({"X": X}) * E.compose({"X": Y})
           * E.compose({"X": X + Y + X * Y * lam}).reciprocal())
    return compare_series("cocycle-quotient", lhs, rhs)


def verify_twisted_identity(p: int, length: int, order: int) -> SeriesComparison:
    """E~_p(W, lam2; E) = E_p(T_V(W), lam1; X), compared through logarithms."""
    sd = symbolic_deformation(p, length, order)
    lhs = ep_tilde_log(sd.W, sd.lam2, sd.family)
    rhs = ep_witt_log(t_a(sd.scaled_u(), sd.W), sd.lam1, order)
    return compare_series("twisted-exponential", lhs, rhs)


def verify_gp_identity(p: int, length: int, order: int) -> SeriesComparison:
    """G_p(F^(lam2) W, lam2; E) = E_p(W, lam2; (E-1)/lam2) / E~_p(W, lam2; E)."""
    sd = symbolic_deformation(p, length, order)
    lhs = gp_series_log(f_lambda(sd.W, sd.lam2), sd.lam2, sd.family)
    rhs = sd.shifted_log() - ep_tilde_log(sd.W, sd.lam2, sd.family)
    return compare_series("correction-factor", lhs, rhs)


def verify_decomposition_identity(p: int, length: int, order: int) -> SeriesComparison:
    """E_p(W, lam2; (E-1)/lam2) = E_p(T_V(W), lam1; X) * G_p(F^(lam2) W, lam2; E)."""
    sd = symbolic_deformation(p, length, order)
    lhs = sd.shifted_log()
    rhs = (ep_witt_log(t_a(sd.scaled_u(), sd.W), sd.lam1, order)
           + gp_series_log(f_lambda(sd.W, sd.lam2), sd.lam2, sd.family))
    return compare_series("twisted-decomposition", lhs, rhs)


# -- cocycles and the deformation group law ---------------------------------

@dataclass(frozen=True)
class CocycleReport:
    symmetry: SeriesComparison
    cocycle: SeriesComparison

    @property
    def holds(self) -> bool:
        return self.symmetry.holds and self.cocycle.holds

    def evidence(self) -> Dict[str, Any]:
        return {"symmetry": self.symmetry.evidence(), "cocycle": self.cocycle.evidence()}


def cocycle_conditions(series: Series, lam, order: Optional[int] = None) -> CocycleReport:
    """
    Symmetry F(X, Y) = F(Y, X) and F(Y, Z) F(X, Y.Z) = F(X, Y) F(X.Y, Z)
    for the law x.y = x + y + lam xy, to total degree order.
    """
    if len(series.variables) != 2:
        raise ValueError("cocycle conditions need a two-variable series")
    if series.constant_term != 1:
        raise BadConstantTerm("a cocycle needs constant term 1")
    ring = series.ring
    order = series.order if order is None else min(order, series.order)
    lam = ring.coerce(lam)
    F = series.truncate(order)
    symmetry = compare_series("symmetry", F, F.swap())
    names = ("X", "Y", "Z")
    X, Y, Z = (Series.variable(ring, names, order, n) for n in names)

    def law(a, b):
        return a + b + a * b * lam

    lhs = F.compose({"X": Y, "Y": Z}) * F.compose({"X": X, "Y": law(Y, Z)})
    rhs = F.compose({"X": X, "Y": Y}) * F.compose({"X": law(X, Y), "Y": Z})
    return CocycleReport(symmetry, compare_series("cocycle", lhs, rhs))


def group_law_identities(p: int, l: int) -> List[SeriesComparison]:
    """
    Polynomial identities of the deformation group law over Q[lam, 1/lam]:
    associativity, alpha(x) = 1 + lam x as a homomorphism into the
    multiplicative group, psi(x) = lam^(-p^l)((1 + lam x)^(p^l) - 1) as a
    homomorphism to the law with parameter lam^(p^l), and
    (1 + lam x)^(p^l) = 1 + lam^(p^l) psi(x).
    """
    base = RingDescriptor.polynomial(RingDescriptor.fraction(RingDescriptor.integers()), ["lam"])
    ring = make_ring(RingDescriptor.localization(base, ["lam"]))
    lam = ring.gens["lam"]
    q = p ** l
    mu = lam ** q
    order = 2 * q
    names = ("X", "Y", "Z")
    X, Y, Z = (Series.variable(ring, names, order, n) for n in names)

    def law(a, b, c):
        return a + b + a * b * c

    def psi(a):
        return ((a * lam + 1) ** q - 1) * ring.inverse_gen("lam") ** q

    return [
        compare_series("law-associativity", law(law(X, Y, lam), Z, lam), law(X, law(Y, Z, lam), lam)),
        compare_series("alpha-homomorphism", law(X, Y, lam) * lam + 1, (X * lam + 1) * (Y * lam + 1)),
        compare_series("psi-homomorphism", psi(law(X, Y, lam)), law(psi(X), psi(Y), mu)),
        compare_series("psi-unit", (X * lam + 1) ** q, psi(X) * mu + 1),
    ]

"""
Duality Lab
Builds psi, the Hopf algebra of N_l = Ker psi, the two kernels compared
on a Witt window, the exponential congruences, the pairing
x -> E_p(x, lam; t) into N_l's group-likes and the characteristic-p
regression, and verifies each of them exactly over finite rings through
their p-torsion-free lifts.

Every division by a power of lam or p happens in the lift; results are
reduced into A afterwards.
"""
import logging
import math
import time
import zlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sympy import isprime

from .ahseries import (Series, cocycle_conditions, compare_series, ep_two_param, ep_witt,
                       ep_witt_log, fp_cocycle, artin_hasse, FrobeniusFamily,
                       gp_series_log, group_law_identities, p_integrality,
                       rational_polynomial_ring, truncation_depth,
                       verify_decomposition_identity, verify_gp_identity,
                       verify_quotient_identity, verify_twisted_identity)
from .errors import ConfigError, InvalidDescriptor, NotFinite, NotNilpotent, WittlabError
from .exactring import (CyclotomicRing, Ring, RingDescriptor, declared_lift, embed,
                        enumerate_elements, evaluate_polynomial, make_ring, p_local_hull,
                        parse_element, reduce)
from .wittcore import (KINDS, WittBatch, WittVector, default_cache, f_lambda, frobenius,
                       ghost, ghost_invert, p_power_teichmuller, scalar_multiple, t_a,
                       verschiebung, GhostVector)

logger = logging.getLogger(__name__)

SUITES = ("witt-axioms", "series-identities", "lemma1", "lemma2", "pairing", "diagram",
          "theorem2")

DEFAULT_ORDERS = {"series-identities": 8, "lemma2": 8, "pairing": 8, "diagram": 6}
TWO_VARIABLE_ORDER = 6
COCYCLE_ORDER = 5
DEFAULT_SAMPLES = {"witt-axioms": 200, "pairing": 12}
DEFAULT_THEOREM2_CASES = ((2, 2, 1), (3, 1, 1), (2, 1, 0))

MAX_ENUMERATION = 4096
PASS, FAIL, SKIP = "pass", "fail", "skip"


# -- instances -------------------------------------------------------------------

def _is_power_of(n: int, p: int) -> bool:
    while n > 1 and n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class DualityInstance:
    """
    A finite ring A with p^l = 0, its p-torsion-free lift and lam given
    in the lift.
    """
    name: str
    ring: Ring
    lift: Ring
    p: int
    l: int
    lam_lift: Any

    def __post_init__(self):
        if not isprime(self.p):
            raise ConfigError(f"p={self.p} is not prime")
        if self.l < 1:
            raise ConfigError(f"l must be >= 1, got {self.l}")
        if not self.ring.is_finite:
            raise ConfigError(f"{self.ring.descriptor.describe()} is not finite")
        if not self.ring.kills(self.p ** self.l):
            raise ConfigError(f"{self.p}^{self.l} is not zero in {self.ring.descriptor.describe()}")
        object.__setattr__(self, "lam_lift", self.lift.coerce(self.lam_lift))

    @classmethod
    def from_mapping(cls, cfg: Mapping[str, Any], name: Optional[str] = None) -> "DualityInstance":
        """
        Build an instance from the keys of an [instance] section: ring, p,
        l, modulus, lift and lambda.
        """
        try:
            descriptor = RingDescriptor.from_mapping(cfg)
        except InvalidDescriptor as exc:
            raise ConfigError(str(exc)) from exc
        ring = make_ring(descriptor)
        try:
            lift = declared_lift(ring)
        except WittlabError as exc:
            raise ConfigError(str(exc)) from exc
        if cfg.get("lift"):
            try:
                declared = RingDescriptor.from_mapping(cfg, key="lift")
            except InvalidDescriptor as exc:
                raise ConfigError(str(exc)) from exc
            if declared != lift.descriptor:
                raise ConfigError(f"{descriptor.describe()} lifts to {lift.descriptor.describe()}, "
                                  f"not {declared.describe()}")
        try:
            p = int(cfg.get("p", descriptor.p or 0))
            l = int(cfg.get("l", descriptor.l or 0))
        except ValueError as exc:
            raise ConfigError(f"p and l must be integers: {exc}") from exc
        if descriptor.kind == "modular" and not _is_power_of(descriptor.modulus, p):
            raise ConfigError(f"modulus {descriptor.modulus} is not a power of {p}")
        if descriptor.p is not None and descriptor.p != p:
            raise ConfigError(f"ring prime {descriptor.p} differs from p={p}")
        if "lambda" not in cfg:
            raise ConfigError("instance needs a lambda")
        try:
            lam = parse_element(cfg["lambda"], lift)
        except InvalidDescriptor as exc:
            raise ConfigError(str(exc)) from exc
        return cls(name or str(cfg.get("name", "instance")), ring, lift, p, l, lam)

    @property
    def q(self) -> int:
        return self.p ** self.l

    @property
    def lam(self):
        return reduce(self.lam_lift, self.ring)

    @property
    def mu_lift(self):
        return self.lam_lift ** self.q

    @property
    def mu(self):
        return reduce(self.mu_lift, self.ring)

    @property
    def local(self) -> Ring:
        """The lift with primes other than p inverted; divisions happen here."""
        return p_local_hull(self.lift, self.p)

    @property
    def lam_local(self):
        return embed(self.lam_lift, self.local)

    @property
    def lam_is_zero(self) -> bool:
        return self.lift.is_zero(self.lam_lift)

    def summary(self) -> str:
        return (f"{self.name}: A={self.ring.descriptor.describe()} "
                f"lift={self.lift.descriptor.describe()} p={self.p} l={self.l} "
                f"lambda={self.lift.to_text(self.lam_lift)}")


@dataclass
class VerificationReport:
    check: str
    anchor: str
    outcome: str
    evidence: Dict[str, Any]
    instance: str = ""
    millis: int = 0

    @property
    def passed(self) -> bool:
        return self.outcome == PASS

    def to_dict(self) -> Dict[str, Any]:
        return {"check": self.check, "anchor": self.anchor, "outcome": self.outcome,
                "evidence": self.evidence, "instance": self.instance, "millis": self.millis}


def _report(check: str, anchor: str, instance: Optional[DualityInstance], ok: bool,
            evidence: Dict[str, Any]) -> VerificationReport:
    outcome = PASS if ok else FAIL
    if not ok:
        logger.warning("%s failed: %s", check, evidence)
    return VerificationReport(check, anchor, outcome, evidence,
                              instance.summary() if instance is not None else "")


def _clip(text: str, width: int = 160) -> str:
    return text if len(text) <= width else text[:width - 3] + "..."


# -- divisibility and psi ----------------------------------------------------------

@dataclass(frozen=True)
class DivisibilityWitness:
    """a = lam^(-p^l) p^l [lam] in the lift and reduced into A."""
    a_lift: WittVector
    a: WittVector
    b_lift: WittVector
    quotients: Tuple[str, ...]

    def evidence(self) -> Dict[str, Any]:
        return {"a_lift": self.a_lift.to_text(), "a": self.a.to_text(),
                "quotients": list(self.quotients)}


@lru_cache(maxsize=None)
def _divisibility(instance: DualityInstance, length: int) -> DivisibilityWitness:
    lift, p, l, q = instance.local, instance.p, instance.l, instance.q
    lam = instance.lam_local
    denominator = lam ** q
    quotients = []
    for k in range(l + 1):
        numerator = lift.from_int(p ** (l - k)) * lam ** (p ** k)
        quotients.append(lift.to_text(lift.exact_div(numerator, denominator)))
    b = p_power_teichmuller(p, l, length).b
    powers: Dict = {}
    b_values = [evaluate_polynomial(c, [lam], lift, powers) for c in b.coords]
    a_values = [lift.exact_div(c, denominator) for c in b_values]
    a_lift = WittVector(p, lift, a_values)
    a = WittVector(p, instance.ring, [reduce(c, instance.ring) for c in a_values])
    logger.debug("a for %s: %s", instance.name, a.to_text())
    return DivisibilityWitness(a_lift, a, WittVector(p, lift, b_values), tuple(quotients))


def check_divisibility(instance: DualityInstance, length: Optional[int] = None) -> DivisibilityWitness:
    """
    Exact quotients lam^(-p^l) p^(l-k) lam^(p^k) for 0 <= k <= l and the
    vector a.  Raises NotDivisible, or AmbiguousQuotient when lam = 0.
    """
    return _divisibility(instance, length or instance.l + 1)


def divisibility_report(instance: DualityInstance, length: Optional[int] = None) -> VerificationReport:
    witness = check_divisibility(instance, length)
    return _report("divisibility", "divisibility-witnesses", instance, True, witness.evidence())


@dataclass(frozen=True)
class PsiPolynomial:
    """Monic psi(X) = lam^(-p^l)((1 + lam X)^(p^l) - 1); coefficients low to high."""
    lift_coeffs: Tuple
    coeffs: Tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def to_text(self, ring: Ring) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if ring.is_zero(c):
                continue
            power = "" if k == 0 else ("X" if k == 1 else f"X^{k}")
            text = ring.to_text(c)
            if not power:
                terms.append(text)
            elif text == "1":
                terms.append(power)
            else:
                terms.append(f"({text})*{power}")
        return " + ".join(terms) if terms else "0"

    def series(self, ring: Ring, variables: Sequence[str], order: int, name: str = "X",
               reduced: bool = False) -> Series:
        """psi in the named variable, over a ring the lift embeds into, or over A when reduced."""
        index = tuple(variables).index(name)
        coeffs = {}
        for k, c in enumerate(self.coeffs if reduced else self.lift_coeffs):
            exps = [0] * len(tuple(variables))
            exps[index] = k
            coeffs[tuple(exps)] = ring.coerce(c) if reduced else embed(c, ring)
        return Series(ring, variables, order, coeffs)


@lru_cache(maxsize=None)
def psi_polynomial(instance: DualityInstance) -> PsiPolynomial:
    lift, q = instance.local, instance.q
    lam = instance.lam_local
    if instance.lam_is_zero:
        lift_coeffs = [lift.zero] * q + [lift.one]
    else:
        denominator = lam ** q
        lift_coeffs = [lift.zero]
        for k in range(1, q):
            lift_coeffs.append(lift.exact_div(lift.from_int(math.comb(q, k)) * lam ** k, denominator))
        lift_coeffs.append(lift.one)
    coeffs = tuple(reduce(c, instance.ring) for c in lift_coeffs)
    return PsiPolynomial(tuple(lift_coeffs), coeffs)


# -- the Hopf algebra of N_l ----------------------------------------------------------

Element = Dict[Tuple[int, ...], Any]


class QuotientPolynomials:
    """A[X_1, ..., X_k]/(psi(X_1), ..., psi(X_k)) for a monic psi, in normal form."""

    def __init__(self, ring: Ring, psi: Sequence, nvars: int):
        if psi[-1] != 1:
            raise ValueError("psi must be monic")
        self.ring = ring
        self.rank = len(psi) - 1
        self.nvars = nvars
        self.tail = [(k, -c) for k, c in enumerate(psi[:-1]) if not ring.is_zero(c)]

    def normalize(self, terms: Element) -> Element:
        ring, r = self.ring, self.rank
        out: Element = {}
        stack = list(terms.items())
        while stack:
            e, c = stack.pop()
            if ring.is_zero(c):
                continue
            i = next((i for i, x in enumerate(e) if x >= r), None)
            if i is None:
                out[e] = out.get(e, ring.zero) + c
                continue
            for k, t in self.tail:
                reduced = list(e)
                reduced[i] = e[i] - r + k
                stack.append((tuple(reduced), c * t))
        return {e: c for e, c in out.items() if not ring.is_zero(c)}

    def constant(self, c) -> Element:
        return self.normalize({(0,) * self.nvars: self.ring.coerce(c)})

    def one(self) -> Element:
        return self.constant(self.ring.one)

    def variable(self, i: int = 0) -> Element:
        exps = [0] * self.nvars
        exps[i] = 1
        return self.normalize({tuple(exps): self.ring.one})

    def add(self, a: Element, b: Element) -> Element:
        out = dict(a)
        for e, c in b.items():
            out[e] = out.get(e, self.ring.zero) + c
        return {e: c for e, c in out.items() if not self.ring.is_zero(c)}

    def scale(self, a: Element, c) -> Element:
        c = self.ring.coerce(c)
        return {e: v * c for e, v in a.items() if not self.ring.is_zero(v * c)}

    def neg(self, a: Element) -> Element:
        return {e: -c for e, c in a.items()}

    def mul(self, a: Element, b: Element) -> Element:
        raw: Element = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                raw[e] = raw.get(e, self.ring.zero) + ca * cb
        return self.normalize(raw)

    def power(self, a: Element, n: int) -> Element:
        result, base = self.one(), a
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def evaluate(self, coeffs: Sequence, at: Element) -> Element:
        """Horner evaluation of sum coeffs[k] T^k at T = at."""
        result: Element = {}
        for c in reversed(list(coeffs)):
            result = self.add(self.mul(result, at), self.constant(c))
        return result

    def equal(self, a: Element, b: Element) -> bool:
        return not self.add(a, self.neg(b))

    def to_text(self, a: Element, names: Sequence[str] = ("t", "s", "u")) -> str:
        if not a:
            return "0"
        terms = []
        for e in sorted(a, key=lambda e: (sum(e), e)):
            mono = "*".join(names[i] if x == 1 else f"{names[i]}^{x}"
                            for i, x in enumerate(e) if x)
            text = self.ring.to_text(a[e])
            terms.append(text if not mono else (mono if text == "1" else f"({text})*{mono}"))
        return " + ".join(terms)


class HopfPresentation:
    """
    N_l = Spec A[X]/(psi(X)) with Delta(X) = X(x)1 + 1(x)X + lam X(x)X,
    counit X -> 0 and antipode X -> -X (1 + lam X)^(p^l - 1).
    """

    def __init__(self, instance: DualityInstance, psi: PsiPolynomial):
        self.instance = instance
        self.ring = instance.ring
        self.psi = psi
        self.lam = instance.lam
        self.single = QuotientPolynomials(self.ring, psi.coeffs, 1)
        self.double = QuotientPolynomials(self.ring, psi.coeffs, 2)
        self.triple = QuotientPolynomials(self.ring, psi.coeffs, 3)
        self._nilpotency: Optional[Tuple[Optional[int], int]] = None

    @property
    def rank(self) -> int:
        return self.single.rank

    def law(self, algebra: QuotientPolynomials, a: Element, b: Element) -> Element:
        return algebra.add(algebra.add(a, b), algebra.scale(algebra.mul(a, b), self.lam))

    def element(self, coeffs: Sequence) -> Element:
        """sum coeffs[k] X^k in normal form."""
        return self.single.evaluate(coeffs, self.single.variable())

    def coefficients(self, g: Element) -> Tuple:
        zero = self.ring.zero
        return tuple(g.get((k,), zero) for k in range(self.rank))

    def comultiply(self, g: Element) -> Element:
        sum_xy = self.law(self.double, self.double.variable(0), self.double.variable(1))
        return self.double.evaluate(self.coefficients(g), sum_xy)

    def counit(self, g: Element):
        return g.get((0,), self.ring.zero)

    def antipode(self) -> Element:
        single, X = self.single, self.single.variable()
        unit_part = single.add(single.one(), single.scale(X, self.lam))
        return single.neg(single.mul(X, single.power(unit_part, self.instance.q - 1)))

    def axioms(self) -> Dict[str, bool]:
        """Exact checks of the Hopf structure on the generator and the basis."""
        single, double, triple = self.single, self.double, self.triple
        X1, X2 = double.variable(0), double.variable(1)
        sum_xy = self.law(double, X1, X2)
        Y1, Y2, Y3 = (triple.variable(i) for i in range(3))
        S = self.antipode()
        X = single.variable()
        counit_ok = True
        for k in range(self.rank):
            basis = single.power(X, k)
            image = self.comultiply(basis)
            left = {(e[1],): c for e, c in image.items() if e[0] == 0}
            right = {(e[0],): c for e, c in image.items() if e[1] == 0}
            counit_ok &= single.equal(left, basis) and single.equal(right, basis)
        return {
            "monic": self.psi.coeffs[-1] == 1 and self.psi.degree == self.instance.q,
            "comultiplication_well_defined": not double.evaluate(self.psi.coeffs, sum_xy),
            "coassociative": triple.equal(self.law(triple, self.law(triple, Y1, Y2), Y3),
                                          self.law(triple, Y1, self.law(triple, Y2, Y3))),
            "counit": counit_ok,
            "antipode": not self.law(single, X, S),
            "antipode_well_defined": not single.evaluate(self.psi.coeffs, S),
        }

    def nilpotency(self) -> Tuple[Optional[int], int]:
        """
        (n, steps): n is the least power with X^n = 0, or None when the
        powers of X enter a cycle first.
        """
        if self._nilpotency is None:
            single, X = self.single, self.single.variable()
            seen = set()
            power, n = single.one(), 0
            bound = self.ring.cardinality ** self.rank + 1
            while n <= bound:
                if not power:
                    self._nilpotency = (n, n)
                    break
                key = tuple(sorted(power.items(), key=lambda kv: kv[0]))
                if key in seen:
                    self._nilpotency = (None, n)
                    break
                seen.add(key)
                power = single.mul(power, X)
                n += 1
            else:
                self._nilpotency = (None, n)
        return self._nilpotency

    @property
    def nilpotent(self) -> bool:
        return self.nilpotency()[0] is not None

    def from_series(self, series: Series) -> Element:
        if len(series.variables) != 1:
            raise ValueError("only one-variable series map into A[X]/psi")
        coeffs = [series.coefficient(k) for k in range(series.order + 1)]
        return self.element([embed(c, self.ring) for c in coeffs])

    def is_group_like(self, g: Element) -> bool:
        if self.counit(g) != 1:
            return False
        double = self.double
        left = {(e[0], 0): c for e, c in g.items()}
        right = {(0, e[0]): c for e, c in g.items()}
        return double.equal(self.comultiply(g), double.mul(left, right))

    def group_likes(self) -> List[Element]:
        """Every group-like element over A, by exhaustive search."""
        size = self.ring.cardinality ** (self.rank - 1)
        if size > MAX_ENUMERATION:
            raise NotFinite(f"{size} candidate group-likes exceed {MAX_ENUMERATION}")
        elements = list(self.ring.elements())
        found = []
        for tail in np.ndindex(*([len(elements)] * (self.rank - 1))):
            g = self.element([self.ring.one] + [elements[i] for i in tail])
            if self.is_group_like(g):
                found.append(g)
        return found


@lru_cache(maxsize=None)
def nl_hopf(instance: DualityInstance) -> HopfPresentation:
    return HopfPresentation(instance, psi_polynomial(instance))


def hopf_report(instance: DualityInstance) -> VerificationReport:
    hopf = nl_hopf(instance)
    axioms = hopf.axioms()
    index, steps = hopf.nilpotency()
    evidence = {"psi": hopf.psi.to_text(instance.ring), "rank": hopf.rank,
                "axioms": axioms, "nilpotent": index is not None, "powers_examined": steps}
    if index is not None:
        evidence["nilpotency_index"] = index
    return _report("hopf-structure", "finite-group-scheme", instance, all(axioms.values()), evidence)


# -- kernels on a Witt window ----------------------------------------------------

def lemma1_kernels(instance: DualityInstance, window: int = 2) -> VerificationReport:
    """
    Ker F^(mu) against Ker F^(lam) o T_a on W_{n+1}(A) -> W_n(A), mu = lam^(p^l).

    Passes when Ker F^(mu) lies in Ker F^(lam) T_a and F^(lam) T_a is
    constant on the fibres of F^(mu), i.e. factors through its image;
    equality of the kernels is reported alongside.
    """
    n = window
    witness = check_divisibility(instance, n + 1)
    batch = WittBatch(instance.p, instance.ring, n + 1)
    if batch.count > MAX_ENUMERATION:
        raise NotFinite(f"W_{n + 1} has {batch.count} vectors, above {MAX_ENUMERATION}")
    f_mu = batch.f_lambda(batch.columns, instance.mu)
    f_ta = batch.f_lambda(batch.t_a(witness.a, batch.columns), instance.lam)
    ker_mu = batch.kernel_mask(f_mu)
    ker_ta = batch.kernel_mask(f_ta)
    inclusion = bool(np.all(ker_ta[ker_mu]))
    equal = bool(np.array_equal(ker_mu, ker_ta))

    keys_mu, keys_ta = batch.row_keys(f_mu), batch.row_keys(f_ta)
    fibres, inverse = np.unique(keys_mu, return_inverse=True)
    lo = np.full(len(fibres), np.iinfo(np.int64).max, dtype=np.int64)
    hi = np.full(len(fibres), np.iinfo(np.int64).min, dtype=np.int64)
    np.minimum.at(lo, inverse, keys_ta)
    np.maximum.at(hi, inverse, keys_ta)
    factors = bool(np.all(lo == hi))

    evidence: Dict[str, Any] = {
        "window": f"W{n + 1}->W{n}", "vectors": int(batch.count),
        "kernel_f_mu": int(ker_mu.sum()), "kernel_f_lambda_t_a": int(ker_ta.sum()),
        "image_f_mu": int(len(fibres)), "image_f_lambda_t_a": int(len(np.unique(keys_ta))),
        "inclusion": inclusion, "equal": equal, "factors_through_image": factors,
        "a": witness.a.to_text(),
    }
    extra = np.flatnonzero(ker_ta & ~ker_mu)
    if extra.size:
        evidence["first_extra_kernel_vector"] = batch.vector(int(extra[0])).to_text()
    missing = np.flatnonzero(ker_mu & ~ker_ta)
    if missing.size:
        evidence["first_missing_kernel_vector"] = batch.vector(int(missing[0])).to_text()
    return _report("lemma1-kernels", "kernel-equality", instance, inclusion and factors, evidence)


# -- congruences in the lift -----------------------------------------------------------

def _symbolic_ring(instance: DualityInstance, names: Sequence[str], rational: bool = False) -> Ring:
    base = instance.lift.descriptor
    if rational:
        base = RingDescriptor.fraction(base)
    ring = make_ring(RingDescriptor.polynomial(base, list(names)))
    return p_local_hull(ring, instance.p)


def _generators(ring: Ring, names: Sequence[str]) -> List:
    if isinstance(ring, CyclotomicRing):
        return [ring.coerce(ring.scalars.gens[n]) for n in names]
    return [ring.gens[n] for n in names]


@dataclass
class LiftedSetup:
    """Symbolic x over the lift (or its fraction field) with lam, mu, a and psi moved alongside."""
    ring: Ring
    x: WittVector
    lam: Any
    mu: Any
    a: WittVector
    psi: PsiPolynomial
    witness: DivisibilityWitness
    order: int


def lifted_setup(instance: DualityInstance, length: int, order: int,
                 rational: bool = False) -> LiftedSetup:
    n = max(length, truncation_depth(instance.p, order) + 1)
    names = [f"x{i}" for i in range(n)]
    ring = _symbolic_ring(instance, names, rational)
    witness = check_divisibility(instance, n)
    x = WittVector(instance.p, ring, _generators(ring, names))
    lam = embed(instance.lam_local, ring)
    a = WittVector(instance.p, ring, [embed(c, ring) for c in witness.a_lift.coords])
    return LiftedSetup(ring, x, lam, lam ** instance.q, a, psi_polynomial(instance), witness, order)


def congruence_evidence(lhs: Series, rhs: Series, p: int, l: int) -> Dict[str, Any]:
    """Checks that every coefficient of lhs - rhs is p^l times an element of the ring."""
    diff = lhs - rhs
    ring = diff.ring
    failing = sorted((e for e, c in diff.coeffs.items() if ring.valuation(c, p) < l),
                     key=lambda e: (sum(e), tuple(-x for x in e)))
    evidence: Dict[str, Any] = {"order": diff.order, "modulus": p ** l,
                                "nonzero_differences": len(diff.coeffs), "holds": not failing}
    if failing:
        evidence["first_failing_degree"] = sum(failing[0])
        evidence["first_failing_monomial"] = diff._monomial_text(failing[0]) or "1"
    elif diff.coeffs:
        e = min(diff.coeffs, key=lambda e: (sum(e), tuple(-x for x in e)))
        quotient = ring.exact_div(diff.coeffs[e], ring.from_int(p ** l))
        evidence["witness"] = {"monomial": diff._monomial_text(e) or "1",
                               "quotient": _clip(ring.to_text(quotient))}
    return evidence


def supporting_identity(instance: DualityInstance, order: int) -> Dict[str, Any]:
    """E_p(p^l [lam], lam; X) = (1 + lam X)^(p^l) over the p-local hull of the lift."""
    hull = instance.local
    n = truncation_depth(instance.p, order) + 1
    b = p_power_teichmuller(instance.p, instance.l, n).b
    lam = instance.lam_local
    powers: Dict = {}
    b_values = WittVector(instance.p, hull, [evaluate_polynomial(c, [lam], hull, powers)
                                            for c in b.coords])
    lhs = ep_witt(b_values, lam, order)
    X = Series.variable(hull, ("X",), order)
    rhs = (X * lam + 1) ** instance.q
    return compare_series("power-teichmuller-exponential", lhs, rhs).evidence()


def torsion_exponent(instance: DualityInstance) -> int:
    """Smallest m with p^m = 0 in A; congruences over the lift are read modulo p^m."""
    for m in range(1, instance.l + 1):
        if instance.ring.kills(instance.p ** m):
            return m
    return instance.l


def kernel_sample(instance: DualityInstance, lam, length: int, count: int,
                  rng: np.random.Generator) -> List[WittVector]:
    """
    Random points of Ker F^(lam) on W_length(A) -> W_{length-1}(A).

    Points grow one coordinate at a time: F^(lam)(x)_{k-1} only involves
    x_0, ..., x_k, so each new coordinate is drawn from the elements that
    keep the prefix in the kernel.  The zero vector is returned when no
    draw completes.
    """
    ring, p = instance.ring, instance.p
    elements = enumerate_elements(ring)
    points: List[WittVector] = []
    for _ in range(20 * count):
        if len(points) == count:
            break
        coords = [elements[int(rng.integers(len(elements)))]]
        for k in range(1, length):
            options = [c for c in elements
                       if ring.is_zero(f_lambda(WittVector(p, ring, coords + [c]), lam).coords[k - 1])]
            if not options:
                break
            coords.append(options[int(rng.integers(len(options)))])
        else:
            points.append(WittVector(p, ring, coords))
    return points or [WittVector.zero(p, ring, length)]


def kernel_exponentials(instance: DualityInstance, order: int, samples: int = 8,
                        seed: int = 0) -> Dict[str, Any]:
    """E_p(x, mu; psi(X)) = E_p(T_a x, lam; X) in A[[X]] for sampled x in Ker F^(mu)."""
    n = truncation_depth(instance.p, order) + 1
    a = check_divisibility(instance, n).a
    psi = psi_polynomial(instance).series(instance.ring, ("X",), order, reduced=True)
    points = kernel_sample(instance, instance.mu, n, samples, _rng(seed, "kernel-exponentials"))
    failures = []
    for x in points:
        lhs = ep_witt(x, instance.mu, order).compose({"X": psi})
        diff = lhs.first_difference(ep_witt(t_a(a, x), instance.lam, order))
        if diff is not None:
            failures.append(f"x={x.to_text()} at X^{diff[0][0]}")
    return {"points": len(points), "length": n, "holds": not failures, "failures": failures[:5]}


def kernel_cocycles(instance: DualityInstance, order: int, samples: int = 8,
                    seed: int = 0) -> Dict[str, Any]:
    """F_p(F^(mu) x, mu; psi(X), psi(Y)) = F_p(F^(lam) T_a x, lam; X, Y) for sampled x in Ker F^(mu)."""
    n = truncation_depth(instance.p, order) + 1
    a = check_divisibility(instance, n).a
    psi = psi_polynomial(instance)
    names = ("X", "Y")
    psi_x = psi.series(instance.ring, names, order, "X", reduced=True)
    psi_y = psi.series(instance.ring, names, order, "Y", reduced=True)
    points = kernel_sample(instance, instance.mu, n, samples, _rng(seed, "kernel-cocycles"))
    failures = []
    for x in points:
        lhs = fp_cocycle(f_lambda(x, instance.mu), instance.mu, order).compose({"X": psi_x, "Y": psi_y})
        rhs = fp_cocycle(f_lambda(t_a(a, x), instance.lam), instance.lam, order)
        if lhs != rhs:
            failures.append(x.to_text())
    return {"points": len(points), "length": n, "holds": not failures, "failures": failures[:5]}


def lemma2_congruence(instance: DualityInstance, length: int = 3, order: int = 8,
                      decomposition: bool = True, samples: int = 8,
                      seed: int = 0) -> VerificationReport:
    """
    E_p(x, mu; psi(X)) = E_p(T_a x, lam; X) mod p^l for x in Ker F^(mu).

    Three parts: the exact factorisation E_p(x, mu; psi(X)) =
    E_p(T_a x, lam; X) G_p(F^(mu) x, mu; (1 + lam X)^(p^l)) for symbolic
    x over the lift, G_p = 1 mod p^m whenever F^(mu) x = 0 mod p^m
    (p^m = 0 in A), and the congruence itself on sampled kernel points of A.
    Outside the kernel G_p is not congruent to 1.
    """
    evidence: Dict[str, Any] = {"power_teichmuller": supporting_identity(instance, order),
                                "correction": correction_congruence(instance, length, order),
                                "kernel_points": kernel_exponentials(instance, order, samples, seed)}
    ok = (evidence["power_teichmuller"]["holds"] and evidence["correction"]["holds"]
          and evidence["kernel_points"]["holds"])
    if decomposition:
        evidence["decomposition"] = exact_decomposition(instance, length, order)
        ok = ok and evidence["decomposition"]["holds"]
    return _report("lemma2-congruence", "exponential-congruence", instance, ok, evidence)


def _family(instance: DualityInstance, setup: LiftedSetup) -> FrobeniusFamily:
    ring = setup.ring
    b = [embed(c, ring) for c in _b_values(instance, setup.x.length)]
    return FrobeniusFamily(WittVector(instance.p, ring, b), setup.lam, setup.order)


def exact_decomposition(instance: DualityInstance, length: int, order: int) -> Dict[str, Any]:
    """
    Over the fraction field of the lift: log E_p(x, mu; psi(X)) equals
    log E_p(T_a x, lam; X) + log G_p(F^(mu) x, mu; (1 + lam X)^(p^l)).
    """
    setup = lifted_setup(instance, length, order, rational=True)
    psi = setup.psi.series(setup.ring, ("X",), order)
    lhs = ep_witt_log(setup.x, setup.mu, order).compose({"X": psi})
    rhs = (ep_witt_log(t_a(setup.a, setup.x), setup.lam, order)
           + gp_series_log(f_lambda(setup.x, setup.mu), setup.mu, _family(instance, setup)))
    return compare_series("correction-decomposition", lhs, rhs).evidence()


def correction_congruence(instance: DualityInstance, length: int, order: int) -> Dict[str, Any]:
    """G_p(p^m z, mu; (1 + lam X)^(p^l)) = 1 mod p^m for symbolic z, p^m = 0 in A."""
    setup = lifted_setup(instance, length, order, rational=True)
    ring, p = setup.ring, instance.p
    m = torsion_exponent(instance)
    scale = ring.from_int(p ** m)
    y = WittVector(p, ring, [scale * z for z in setup.x.coords])
    gp = gp_series_log(y, setup.mu, _family(instance, setup)).exp()
    evidence = congruence_evidence(gp, Series.one(ring, ("X",), order), p, m)
    evidence["terms"] = len(gp.coeffs)
    return evidence


def _b_values(instance: DualityInstance, length: int) -> List:
    witness = check_divisibility(instance, length)
    return list(witness.b_lift.coords)


def diagram_congruences(instance: DualityInstance, length: int = 3, order: int = 6,
                        samples: int = 8, seed: int = 0) -> VerificationReport:
    """
    (i) E_p(x, mu; psi(X)) = E_p(T_a x, lam; X) and
    (ii) F_p(F^(mu) x, mu; psi(X), psi(Y)) = F_p(F^(lam) T_a x, lam; X, Y),
    both mod p^l for x in Ker F^(mu).  Both sides of (ii) are quotients
    E(X) E(Y) / E(X + Y + lam XY) of the two sides of (i), so the
    congruence of G_p to 1 covers them together.
    """
    correction = correction_congruence(instance, length, order)
    first = kernel_exponentials(instance, order, samples, seed)
    second = kernel_cocycles(instance, order, samples, seed)
    evidence = {"length": length, "modulus": instance.p ** torsion_exponent(instance),
                "correction": correction, "exponential": first, "cocycle": second}
    return _report("diagram-congruences", "diagram-congruences", instance,
                   correction["holds"] and first["holds"] and second["holds"], evidence)


# -- the pairing -----------------------------------------------------------------

def pairing_order(hopf: HopfPresentation) -> int:
    index, _ = hopf.nilpotency()
    if index is None:
        raise NotNilpotent(f"X is not nilpotent in A[X]/({hopf.psi.to_text(hopf.ring)})")
    return max(1, index - 1)


def pairing_phi(instance: DualityInstance, x: WittVector) -> Element:
    """E_p(x, lam; t) in A[t]/(psi(t)); exact because t is nilpotent there."""
    hopf = nl_hopf(instance)
    order = pairing_order(hopf)
    series = ep_witt(x, instance.lam, order)
    return hopf.from_series(series)


def _rng(seed: int, check: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(check.encode())])


def _random_vector(instance: DualityInstance, n: int, rng: np.random.Generator) -> WittVector:
    ring = instance.ring
    return WittVector(instance.p, ring, [ring.random_element(rng) for _ in range(n)])


def _kernel_points(instance: DualityInstance, length: int) -> List[WittVector]:
    """Points of Ker F^(lam) on W_length(A), F^(lam) taken from W_{length+1} padded with 0."""
    batch = WittBatch(instance.p, instance.ring, length)
    if batch.count > MAX_ENUMERATION:
        raise NotFinite(f"W_{length} has {batch.count} vectors, above {MAX_ENUMERATION}")
    padded = batch.columns + [batch.backend.from_int(0)]
    mask = batch.kernel_mask(batch.f_lambda(padded, instance.lam))
    return [batch.vector(int(row)) for row in np.flatnonzero(mask)]


def pairing_checks(instance: DualityInstance, samples: int = 12, order: int = 8,
                   seed: int = 0) -> List[VerificationReport]:
    """
    Group-like, multiplicative and coset-constant checks of the pairing.
    When X is not nilpotent modulo psi the last two run as series
    identities to the given order instead.
    """
    hopf = nl_hopf(instance)
    if hopf.nilpotent:
        return _pairing_in_algebra(instance, hopf, samples, seed)
    return _pairing_as_series(instance, samples, order, seed)


def _pairing_in_algebra(instance, hopf, samples, seed) -> List[VerificationReport]:
    order = pairing_order(hopf)
    n = truncation_depth(instance.p, order) + 1
    single = hopf.single
    reports = []

    points = _kernel_points(instance, n)
    images = [pairing_phi(instance, x) for x in points]
    bad = [x.to_text() for x, g in zip(points, images) if not hopf.is_group_like(g)]
    evidence = {"kernel_points": len(points), "series_order": order,
                "non_group_like": bad[:5]}
    reports.append(_report("pairing-group-like", "pairing-homomorphism", instance, not bad, evidence))

    rng = _rng(seed, "pairing-multiplicative")
    failures = []
    for _ in range(samples):
        x, y = _random_vector(instance, n, rng), _random_vector(instance, n, rng)
        if not single.equal(pairing_phi(instance, x + y),
                            single.mul(pairing_phi(instance, x), pairing_phi(instance, y))):
            failures.append(f"{x.to_text()} + {y.to_text()}")
    reports.append(_report("pairing-multiplicative", "pairing-homomorphism", instance, not failures,
                           {"samples": samples, "failures": failures[:5]}))

    if instance.lam_is_zero:
        reports.append(VerificationReport("pairing-well-defined", "pairing-well-defined", SKIP,
                                          {"reason": "T_a needs lambda != 0"}, instance.summary()))
        return reports
    a = check_divisibility(instance, n).a
    pairs = _coset_pairs(instance, n, samples, seed)
    failures = []
    for x, x0 in pairs:
        if not single.equal(pairing_phi(instance, x + t_a(a, x0)), pairing_phi(instance, x)):
            failures.append(f"x={x.to_text()} x0={x0.to_text()}")
    reports.append(_report("pairing-well-defined", "pairing-well-defined", instance, not failures,
                           {"samples": len(pairs), "failures": failures[:5]}))
    return reports


def _coset_pairs(instance: DualityInstance, n: int, samples: int,
                 seed: int) -> List[Tuple[WittVector, WittVector]]:
    """x in Ker F^(lam) and x0 in Ker F^(mu) on W_n(A)."""
    rng = _rng(seed, "pairing-well-defined")
    xs = kernel_sample(instance, instance.lam, n, samples, rng)
    x0s = kernel_sample(instance, instance.mu, n, samples, rng)
    return list(zip(xs, x0s))


def _pairing_as_series(instance, samples, order, seed) -> List[VerificationReport]:
    ring, p = instance.ring, instance.p
    n = truncation_depth(p, order) + 1
    reports = [VerificationReport("pairing-group-like", "pairing-homomorphism", SKIP,
                                  {"reason": "X is not nilpotent modulo psi"}, instance.summary())]

    rng = _rng(seed, "pairing-multiplicative")
    failures = []
    for _ in range(samples):
        x, y = _random_vector(instance, n, rng), _random_vector(instance, n, rng)
        lhs = ep_witt(x + y, instance.lam, order)
        rhs = ep_witt(x, instance.lam, order) * ep_witt(y, instance.lam, order)
        if lhs != rhs:
            failures.append(f"{x.to_text()} + {y.to_text()}")
    reports.append(_report("pairing-multiplicative", "pairing-homomorphism", instance, not failures,
                           {"samples": samples, "series_order": order, "failures": failures[:5]}))

    if instance.lam_is_zero:
        reports.append(VerificationReport("pairing-well-defined", "pairing-well-defined", SKIP,
                                          {"reason": "T_a needs lambda != 0"}, instance.summary()))
        return reports
    a = check_divisibility(instance, n).a
    psi_series = psi_polynomial(instance).series(ring, ("X",), order, reduced=True)
    pairs = _coset_pairs(instance, n, samples, seed)
    failures = []
    for x, x0 in pairs:
        inner = ep_witt(x0, instance.mu, order)
        shifted = inner.compose({"X": psi_series})
        coset = ep_witt(x + t_a(a, x0), instance.lam, order)
        if coset != ep_witt(x, instance.lam, order) * shifted:
            failures.append(f"x={x.to_text()} x0={x0.to_text()}")
            continue
        # E(x0, mu; psi) - 1 = psi * Q, Q = ((E(x0, mu; Y) - 1) / Y) o psi
        quotient = Series(ring, ("X",), order - 1,
                          {(k - 1,): c for (k,), c in inner.coeffs.items() if k > 0})
        if (shifted - 1).truncate(order - 1) != (psi_series * quotient.compose({"X": psi_series})):
            failures.append(f"psi does not divide E(x0)-1 for x0={x0.to_text()}")
    reports.append(_report("pairing-well-defined", "pairing-well-defined", instance, not failures,
                           {"samples": len(pairs), "series_order": order, "failures": failures[:5]}))
    return reports


# -- characteristic p ------------------------------------------------------------

def char_p_instance(p: int, l: int, lam: int) -> DualityInstance:
    ring = make_ring(RingDescriptor.modular(p))
    lift = make_ring(RingDescriptor.p_local(p))
    return DualityInstance(f"F{p}-l{l}-lambda{lam}", ring, lift, p, l, lam)


def theorem2_regression(p: int, l: int, lam: int) -> VerificationReport:
    """
    Over F_p: Ker F^(lam) on W_l maps under the pairing bijectively and
    homomorphically onto the group-likes of N_l.
    """
    instance = char_p_instance(p, l, lam)
    hopf = nl_hopf(instance)
    single = hopf.single
    points = _kernel_points(instance, l)
    images = [pairing_phi(instance, x) for x in points]
    group_likes = hopf.group_likes()
    all_group_like = all(hopf.is_group_like(g) for g in images)
    keys = {tuple(sorted(g.items())) for g in images}
    distinct = len(keys) == len(images)
    homomorphism = all(single.equal(pairing_phi(instance, x + y), single.mul(gx, gy))
                       for x, gx in zip(points, images) for y, gy in zip(points, images))
    evidence = {"psi": hopf.psi.to_text(instance.ring), "kernel_points": len(points),
                "group_likes": len(group_likes), "images_group_like": all_group_like,
                "distinct": distinct, "homomorphism": homomorphism,
                "images": [single.to_text(g) for g in images]}
    ok = all_group_like and distinct and homomorphism and len(points) == len(group_likes)
    return _report("theorem2-regression", "char-p-duality", instance, ok, evidence)


# -- Witt and series suites ------------------------------------------------------

def verschiebung_frobenius(instance: DualityInstance, length: int = 3, samples: int = 200,
                           seed: int = 0) -> VerificationReport:
    """
    V(F(x)) = p x holds on W(A) when p = 0 in A.  Otherwise F and V do not
    commute and the check passes on a witness x with V(F(x)) != p x.
    """
    ring, p = instance.ring, instance.p
    char_p = ring.kills(p)
    rng = _rng(seed, "verschiebung-frobenius")
    mismatches = []
    for _ in range(samples):
        x = _random_vector(instance, length, rng)
        if verschiebung(frobenius(x)) != scalar_multiple(p, x).truncate(length - 1):
            mismatches.append(x.to_text())
            if not char_p:
                break
    evidence: Dict[str, Any] = {"characteristic_p": char_p, "samples": samples}
    if char_p:
        evidence["failures"] = mismatches[:5]
        ok = not mismatches
    else:
        evidence["witness"] = mismatches[0] if mismatches else None
        ok = bool(mismatches)
    return _report("verschiebung-frobenius", "frobenius-verschiebung", instance, ok, evidence)


def witt_axiom_checks(instance: DualityInstance, length: int = 3, samples: int = 200,
                      seed: int = 0) -> List[VerificationReport]:
    ring, p = instance.ring, instance.p
    reports = []

    rng = _rng(seed, "witt-ring-axioms")
    failures = []
    one = WittVector.one(p, ring, length)
    zero = WittVector.zero(p, ring, length)
    for _ in range(samples):
        x, y, z = (_random_vector(instance, length, rng) for _ in range(3))
        laws = {
            "add-commutative": x + y == y + x,
            "add-associative": (x + y) + z == x + (y + z),
            "mul-commutative": x * y == y * x,
            "mul-associative": (x * y) * z == x * (y * z),
            "distributive": x * (y + z) == x * y + x * z,
            "additive-inverse": (x + (-x)) == zero,
            "unit": x * one == x,
        }
        failures.extend(f"{law} at {x.to_text()}" for law, ok in laws.items() if not ok)
    reports.append(_report("witt-ring-axioms", "witt-ring", instance, not failures,
                           {"samples": samples, "length": length, "failures": failures[:5]}))

    hull = p_local_hull(instance.lift, p)
    rng = _rng(seed, "ghost-homomorphism")
    failures = []
    for _ in range(min(samples, 50)):
        x = WittVector(p, hull, [hull.random_element(rng) for _ in range(length)])
        y = WittVector(p, hull, [hull.random_element(rng) for _ in range(length)])
        gx, gy = ghost(x).values, ghost(y).values
        if list(ghost(x + y).values) != [a + b for a, b in zip(gx, gy)] or \
                list(ghost(x * y).values) != [a * b for a, b in zip(gx, gy)] or \
                ghost_invert(GhostVector(p, hull, tuple(gx))) != x:
            failures.append(f"{x.to_text()}, {y.to_text()}")
    reports.append(_report("ghost-homomorphism", "ghost-map", instance, not failures,
                           {"samples": min(samples, 50), "ring": hull.descriptor.describe(),
                            "failures": failures[:5]}))

    rng = _rng(seed, "frobenius-verschiebung")
    failures = []
    for _ in range(samples):
        x = _random_vector(instance, length, rng)
        if frobenius(verschiebung(x)) != scalar_multiple(p, x).truncate(length - 1):
            failures.append(x.to_text())
    reports.append(_report("frobenius-verschiebung", "frobenius-verschiebung", instance,
                           not failures, {"samples": samples, "failures": failures[:5]}))
    reports.append(verschiebung_frobenius(instance, length, samples, seed))

    rng = _rng(seed, "t_a-additive")
    failures = []
    for _ in range(samples):
        a, x, y = (_random_vector(instance, length, rng) for _ in range(3))
        if t_a(a, x + y) != t_a(a, x) + t_a(a, y):
            failures.append(f"a={a.to_text()} x={x.to_text()} y={y.to_text()}")
    reports.append(_report("t_a-additive", "t_a-endomorphism", instance, not failures,
                           {"samples": samples, "failures": failures[:5]}))

    depth = length
    integral = {kind: default_cache.table(p, kind, depth).is_integral() for kind in KINDS}
    reports.append(_report("structure-integrality", "structure-polynomials", instance,
                           all(integral.values()), {"depth": depth, "integral": integral}))

    powered = p_power_teichmuller(p, instance.l, length)
    reports.append(_report("power-teichmuller", "power-teichmuller", instance, True,
                           {"b": powered.b.to_text(),
                            "alpha": [str(a) for a in powered.alpha]}))
    return reports


def series_identity_checks(instance: DualityInstance, length: int = 3,
                           order: int = 8) -> List[VerificationReport]:
    """
    One-variable identities to X-degree order, two-variable ones to total
    degree TWO_VARIABLE_ORDER and the three-variable cocycle condition to
    COCYCLE_ORDER, each capped by order.
    """
    p, l = instance.p, instance.l
    two_variable = min(order, TWO_VARIABLE_ORDER)
    reports = []
    integrality = {"artin-hasse": p_integrality(artin_hasse(p, order), p),
                   "two-parameter": p_integrality(ep_two_param(p, order), p)}
    reports.append(_report("series-integrality", "artin-hasse-integrality", instance,
                           not any(integrality.values()),
                           {"order": order, "violations": {k: v for k, v in integrality.items() if v}}))

    for check, anchor, verify, degree in (
            ("cocycle-quotient", "cocycle-quotient", verify_quotient_identity, two_variable),
            ("twisted-exponential", "twisted-exponential", verify_twisted_identity, order),
            ("correction-factor", "correction-factor", verify_gp_identity, order),
            ("twisted-decomposition", "twisted-decomposition", verify_decomposition_identity, order)):
        comparison = verify(p, length, degree)
        reports.append(_report(check, anchor, instance, comparison.holds, comparison.evidence()))

    ring = rational_polynomial_ring(["lam"] + [f"v{i}" for i in range(length)])
    v = WittVector(p, ring, [ring.gens[f"v{i}"] for i in range(length)])
    cocycle = cocycle_conditions(fp_cocycle(v, ring.gens["lam"], two_variable), ring.gens["lam"],
                                 min(order, COCYCLE_ORDER))
    reports.append(_report("fp-cocycle", "symmetric-cocycle", instance, cocycle.holds,
                           cocycle.evidence()))

    laws = group_law_identities(p, l)
    reports.append(_report("group-law", "deformation-group-law", instance,
                           all(c.holds for c in laws), {c.identity: c.holds for c in laws}))
    return reports


# -- suites ------------------------------------------------------------------------

@dataclass(frozen=True)
class SuiteSettings:
    window: int = 2
    order: Optional[int] = None
    length: int = 3
    samples: Optional[int] = None
    seed: int = 0
    theorem2_cases: Tuple[Tuple[int, int, int], ...] = DEFAULT_THEOREM2_CASES

    def order_for(self, suite: str) -> int:
        return self.order or DEFAULT_ORDERS.get(suite, 8)

    def samples_for(self, suite: str) -> int:
        return self.samples if self.samples is not None else DEFAULT_SAMPLES.get(suite, 200)


def _failed(check: str, anchor: str, instance: Optional[DualityInstance],
            exc: WittlabError) -> VerificationReport:
    logger.warning("%s rejected: %s", check, exc)
    return VerificationReport(check, anchor, FAIL,
                              {"error": type(exc).__name__, "detail": str(exc)},
                              instance.summary() if instance is not None else "")


SUITE_ANCHORS = {
    "witt-axioms": "witt-ring", "series-identities": "deformed-exponentials",
    "lemma1": "kernel-equality", "lemma2": "exponential-congruence",
    "pairing": "pairing-homomorphism", "diagram": "diagram-congruences",
    "theorem2": "char-p-duality",
}


def _suite_body(suite: str, instance: DualityInstance,
                settings: SuiteSettings) -> List[VerificationReport]:
    if suite == "witt-axioms":
        return witt_axiom_checks(instance, settings.length, settings.samples_for(suite), settings.seed)
    if suite == "series-identities":
        return series_identity_checks(instance, settings.length, settings.order_for(suite))
    if suite == "lemma1":
        return [divisibility_report(instance, settings.window + 1),
                lemma1_kernels(instance, settings.window)]
    if suite == "lemma2":
        return [lemma2_congruence(instance, settings.length, settings.order_for(suite),
                                  seed=settings.seed)]
    if suite == "pairing":
        checks = pairing_checks(instance, settings.samples_for(suite), settings.order_for(suite),
                                settings.seed)
        return [hopf_report(instance)] + checks
    if suite == "diagram":
        return [diagram_congruences(instance, settings.length, settings.order_for(suite),
                                    seed=settings.seed)]
    if suite == "theorem2":
        return [theorem2_regression(p, l, lam) for p, l, lam in settings.theorem2_cases]
    raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")


def run_suite(suite: str, instance: DualityInstance,
              settings: Optional[SuiteSettings] = None) -> List[VerificationReport]:
    """
    Run one suite.  Instance rejections (exit code 1 errors) become
    failed reports; configuration and internal errors propagate.
    """
    settings = settings or SuiteSettings()
    logger.info("suite %s on %s", suite, instance.name)
    start = time.perf_counter()
    try:
        reports = _suite_body(suite, instance, settings)
    except WittlabError as exc:
        if exc.exit_code != 1:
            raise
        reports = [_failed(suite, SUITE_ANCHORS.get(suite, suite), instance, exc)]
    elapsed = int((time.perf_counter() - start) * 1000)
    for report in reports:
        report.millis = elapsed
    return reports

"""
Truncated Witt Vectors
Arithmetic of p-typical Witt vectors of finite length through universal
integer structure polynomials, obtained once by ghost inversion over a
symbolic integer polynomial ring and then evaluated in any ring.

Operators: sum, product, Frobenius F, Verschiebung V, Teichmuller [lam],
F^(lam) = F - [lam^(p-1)], the additive endomorphism T_a and
T'_a = F^(lam) o T_a.

Truncation: F, F^(lam) and T'_a map length n+1 to length n; every other
operator preserves length.
"""
import logging
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.rings import PolyElement

from .errors import (CorruptCache, IntegralityViolation, LengthMismatch,
                     MismatchWithClosedForm, NotDivisible, NotIntegral,
                     RingMismatch, AmbiguousQuotient)
from .exactring import (CayleyTables, Ring, RingDescriptor, cayley_tables,
                        make_ring)

logger = logging.getLogger(__name__)

KINDS = ("sum", "product", "frobenius", "t_a")

# Generators per symbolic alphabet in the universal rings.
MAX_VARIABLES = 9

# Default depth limits; deeper tables work but grow doubly exponentially.
DEPTH_LIMITS = {2: 5, 3: 4}

CACHE_HEADER = "# wittlab-structure-cache v1"


def _alphabet(kind: str) -> Tuple[str, str]:
    if kind in ("sum", "product"):
        return "X", "Y"
    if kind == "frobenius":
        return "X", ""
    if kind == "t_a":
        return "a", "x"
    raise ValueError(f"unknown structure polynomial kind {kind!r}")


def universal_ring(kind: str) -> Ring:
    first, second = _alphabet(kind)
    names = [f"{first}{i}" for i in range(MAX_VARIABLES)]
    if second:
        names += [f"{second}{i}" for i in range(MAX_VARIABLES)]
    return make_ring(RingDescriptor.polynomial(RingDescriptor.integers(), names))


def ghost_component(p: int, coords: Sequence, i: int, backend: "Backend"):
    """Phi_i(x) = x_0^(p^i) + p x_1^(p^(i-1)) + ... + p^i x_i."""
    total = backend.zero
    for j in range(i + 1):
        term = backend.power(coords[j], p ** (i - j))
        total = backend.add(total, backend.scale(term, p ** j))
    return total


# -- arithmetic backends ------------------------------------------------------

class Backend:
    """Arithmetic on ring elements, one value per coordinate."""

    def __init__(self, ring: Ring):
        self.ring = ring
        self._ints: Dict[int, object] = {}

    @property
    def zero(self):
        return self.from_int(0)

    def from_int(self, n: int):
        value = self._ints.get(n)
        if value is None:
            value = self._ints[n] = self.ring.from_int(n)
        return value

    def constant(self, x):
        return self.ring.coerce(x)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def scale(self, a, n: int):
        return a if n == 1 else self.from_int(n) * a

    def power(self, a, e: int):
        return a ** e if e != 1 else a

    def is_zero_value(self, a) -> bool:
        return self.ring.is_zero(a)


class TableBackend(Backend):
    """
    Vectorised arithmetic over a finite ring: every value is an int64
    array of element indices, one entry per vector of an enumerated batch.
    """

    def __init__(self, tables: CayleyTables, size: int):
        super().__init__(tables.ring)
        self.tables = tables
        self.size = size

    def from_int(self, n: int):
        value = self._ints.get(n)
        if value is None:
            value = self._ints[n] = np.full(self.size, self.tables.int_index(n), dtype=np.int64)
        return value

    def constant(self, x):
        return np.full(self.size, self.tables.index_of(x), dtype=np.int64)

    def add(self, a, b):
        return self.tables.add[a, b]

    def neg(self, a):
        return self.tables.neg[a]

    def mul(self, a, b):
        return self.tables.mul[a, b]

    def scale(self, a, n: int):
        return a if n == 1 else self.tables.mul[self.from_int(n), a]

    def power(self, a, e: int):
        result, base = self.from_int(1), a
        while e:
            if e & 1:
                result = self.tables.mul[result, base]
            e >>= 1
            if e:
                base = self.tables.mul[base, base]
        return result

    def is_zero_value(self, a) -> bool:
        return bool(np.all(a == self.tables.zero_index))


# -- structure polynomials ----------------------------------------------------

@dataclass(frozen=True)
class StructurePolynomialTable:
    p: int
    kind: str
    depth: int
    polynomials: Tuple[PolyElement, ...]

    def is_integral(self) -> bool:
        return all(int(c) == c for poly in self.polynomials for c in poly.values())

    def to_text(self) -> List[str]:
        return [format_record(self.p, self.kind, i, poly) for i, poly in enumerate(self.polynomials)]


def _defining_ghost(p: int, kind: str, i: int, gens: Dict[str, PolyElement], backend: Backend):
    first, second = _alphabet(kind)
    xs = [gens[f"{first}{j}"] for j in range(MAX_VARIABLES)]
    if kind == "sum":
        ys = [gens[f"{second}{j}"] for j in range(MAX_VARIABLES)]
        return ghost_component(p, xs, i, backend) + ghost_component(p, ys, i, backend)
    if kind == "product":
        ys = [gens[f"{second}{j}"] for j in range(MAX_VARIABLES)]
        return ghost_component(p, xs, i, backend) * ghost_component(p, ys, i, backend)
    if kind == "frobenius":
        return ghost_component(p, xs, i + 1, backend)
    a = xs
    x = [gens[f"{second}{j}"] for j in range(MAX_VARIABLES)]
    return sum((p ** k * a[k] ** (p ** (i - k)) * ghost_component(p, x, i - k, backend)
                for k in range(i + 1)), backend.zero)


def ghost_residual(p: int, polys: Sequence[PolyElement], i: int, defining: PolyElement) -> PolyElement:
    """defining - sum_{j<i} p^j P_j^(p^(i-j)); equals p^i P_i for a valid table."""
    residual = defining
    for j in range(i):
        residual = residual - p ** j * polys[j] ** (p ** (i - j))
    return residual


class StructureCache:
    """
    Process-wide store of structure polynomials keyed by (p, kind, index).

    Tables are built lazily; construction is serialised behind a lock and
    records are never modified once stored.
    """

    def __init__(self):
        self._polys: Dict[Tuple[int, str], List[PolyElement]] = {}
        self._compiled: Dict[Tuple[int, str, int], list] = {}
        self._lock = threading.Lock()

    def _extend(self, p: int, kind: str, upto: int):
        if upto > MAX_VARIABLES - (1 if kind == "frobenius" else 0):
            raise ValueError(f"depth {upto} exceeds the universal ring size")
        ring = universal_ring(kind)
        backend = Backend(ring)
        gens = ring.gens
        with self._lock:
            polys = self._polys.setdefault((p, kind), [])
            while len(polys) < upto:
                i = len(polys)
                residual = ghost_residual(p, polys, i, _defining_ghost(p, kind, i, gens, backend))
                modulus = p ** i
                if any(int(c) % modulus for c in residual.values()):
                    raise IntegralityViolation(
                        f"{kind} polynomial {i} for p={p} is not integral")
                polys.append(residual.quo_ground(modulus))
                logger.debug("built %s polynomial %d for p=%d (%d terms)", kind, i, p, len(polys[-1]))

    def polynomial(self, p: int, kind: str, index: int) -> PolyElement:
        polys = self._polys.get((p, kind), [])
        if len(polys) <= index:
            self._extend(p, kind, index + 1)
            polys = self._polys[(p, kind)]
        return polys[index]

    def table(self, p: int, kind: str, depth: int) -> StructurePolynomialTable:
        return StructurePolynomialTable(
            p, kind, depth, tuple(self.polynomial(p, kind, i) for i in range(depth)))

    def compiled(self, p: int, kind: str, index: int) -> list:
        key = (p, kind, index)
        terms = self._compiled.get(key)
        if terms is None:
            poly = self.polynomial(p, kind, index)
            terms = [(int(c), [(v, e) for v, e in enumerate(monom) if e])
                     for monom, c in poly.terms()]
            self._compiled[key] = terms
        return terms

    def dumps(self, p: Optional[int] = None,
              depths: Optional[Mapping[Tuple[int, str], int]] = None) -> str:
        """Cache text; depths restricts it to the listed (p, kind) tables, each cut to its depth."""
        lines = [CACHE_HEADER]
        for (q, kind) in sorted(self._polys):
            if p is not None and q != p:
                continue
            polys = self._polys[(q, kind)]
            if depths is not None:
                if (q, kind) not in depths:
                    continue
                polys = polys[:depths[(q, kind)]]
            for i, poly in enumerate(polys):
                lines.append(format_record(q, kind, i, poly))
        return "\n".join(lines) + "\n"

    def loads(self, text: str, verify: bool = True):
        records = parse_cache(text)
        if verify:
            bad = verify_records(records)
            if bad:
                raise CorruptCache(f"cache record fails its ghost identity: {bad[0]}")
        with self._lock:
            for (p, kind), polys in records.items():
                current = self._polys.get((p, kind), [])
                if len(polys) > len(current):
                    self._polys[(p, kind)] = list(polys)

    def save(self, path: str, p: Optional[int] = None,
             depths: Optional[Mapping[Tuple[int, str], int]] = None):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps(p, depths))
        logger.info("wrote structure cache %s", path)

    def load(self, path: str, verify: bool = True):
        with open(path, "r", encoding="utf-8") as fh:
            self.loads(fh.read(), verify=verify)
        logger.info("loaded structure cache %s", path)


default_cache = StructureCache()


def format_record(p: int, kind: str, index: int, poly: PolyElement) -> str:
    names = poly.ring.symbols
    terms = []
    for monom, coeff in poly.terms():
        factors = [str(int(coeff))]
        for name, e in zip(names, monom):
            if e:
                factors.append(f"{name}^{e}" if e > 1 else str(name))
        terms.append("*".join(factors))
    body = " + ".join(terms) if terms else "0"
    return f"{p}\t{kind}\t{index}\t{body}"


def parse_cache(text: str) -> Dict[Tuple[int, str], List[PolyElement]]:
    """Parse cache text; any malformed line raises CorruptCache naming it."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != CACHE_HEADER:
        raise CorruptCache("missing or unknown cache header")
    records: Dict[Tuple[int, str], Dict[int, PolyElement]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            p_text, kind, index_text, body = line.split("\t")
            p, index = int(p_text), int(index_text)
            ring = universal_ring(kind)
            gens = ring.gens
            poly = ring.zero
            if body != "0":
                for term in body.split(" + "):
                    coeff, *factors = term.split("*")
                    monomial = ring.from_int(int(coeff))
                    for factor in factors:
                        name, _, exp = factor.partition("^")
                        monomial = monomial * gens[name] ** (int(exp) if exp else 1)
                    poly = poly + monomial
        except (ValueError, KeyError) as exc:
            raise CorruptCache(f"line {lineno}: cannot parse record {line[:60]!r}") from exc
        if index in records.setdefault((p, kind), {}):
            raise CorruptCache(f"line {lineno}: duplicate record {p} {kind} {index}")
        records[(p, kind)][index] = poly
    result = {}
    for key, by_index in records.items():
        if sorted(by_index) != list(range(len(by_index))):
            raise CorruptCache(f"records for p={key[0]} {key[1]} are not contiguous")
        result[key] = [by_index[i] for i in range(len(by_index))]
    return result


def verify_records(records: Dict[Tuple[int, str], List[PolyElement]]) -> List[str]:
    """Names of records whose defining ghost identity fails."""
    bad = []
    for (p, kind), polys in sorted(records.items()):
        ring = universal_ring(kind)
        backend = Backend(ring)
        gens = ring.gens
        for i, poly in enumerate(polys):
            residual = ghost_residual(p, polys, i, _defining_ghost(p, kind, i, gens, backend))
            if residual != p ** i * poly:
                bad.append(f"p={p} kind={kind} index={i}")
                break
    return bad


def structure_polynomials(p: int, depth: int, kind: str,
                          cache: Optional[StructureCache] = None) -> StructurePolynomialTable:
    if depth < 1:
        raise LengthMismatch("depth must be at least 1")
    if kind not in KINDS:
        raise ValueError(f"unknown structure polynomial kind {kind!r}")
    return (cache or default_cache).table(p, kind, depth)


def evaluate_terms(terms: list, values: Sequence, backend: Backend):
    """Substitute values (indexed like the universal generators) into compiled terms."""
    powers: Dict[Tuple[int, int], object] = {}
    total = backend.zero
    for coeff, factors in terms:
        acc = None
        for v, e in factors:
            key = (v, e)
            pw = powers.get(key)
            if pw is None:
                pw = powers[key] = backend.power(values[v], e)
            acc = pw if acc is None else backend.mul(acc, pw)
        if acc is None:
            acc = backend.from_int(coeff)
        else:
            acc = backend.scale(acc, coeff) if coeff > 0 else backend.neg(backend.scale(acc, -coeff))
        total = backend.add(total, acc)
    return total


# -- operators on coordinate lists -----------------------------------------

def _padded(coords: Sequence, backend: Backend) -> List:
    return list(coords) + [backend.zero] * (MAX_VARIABLES - len(coords))


def add_coords(p, xs, ys, backend, cache=None):
    cache = cache or default_cache
    values = _padded(xs, backend) + _padded(ys, backend)
    return [evaluate_terms(cache.compiled(p, "sum", i), values, backend) for i in range(len(xs))]


def mul_coords(p, xs, ys, backend, cache=None):
    cache = cache or default_cache
    values = _padded(xs, backend) + _padded(ys, backend)
    return [evaluate_terms(cache.compiled(p, "product", i), values, backend) for i in range(len(xs))]


def minus_one_coords(p: int, n: int) -> List[int]:
    """Coordinates of -1 in W_n(Z): (-1, 0, ...) for odd p, (-1, -1, ...) for p = 2."""
    ring = make_ring(RingDescriptor.integers())
    x = ghost_invert(GhostVector(p, ring, tuple([-1] * n)))
    return [int(c) for c in x.coords]


def neg_coords(p, xs, backend, cache=None):
    minus_one = [backend.from_int(c) for c in minus_one_coords(p, len(xs))]
    return mul_coords(p, minus_one, xs, backend, cache)


def frobenius_coords(p, xs, backend, cache=None):
    cache = cache or default_cache
    values = _padded(xs, backend)
    return [evaluate_terms(cache.compiled(p, "frobenius", i), values, backend)
            for i in range(len(xs) - 1)]


def teich_scale_coords(p, lam, xs, backend):
    return [backend.mul(backend.power(lam, p ** i), x) for i, x in enumerate(xs)]


def f_lambda_coords(p, xs, lam, backend, cache=None):
    fx = frobenius_coords(p, xs, backend, cache)
    scaled = teich_scale_coords(p, backend.power(lam, p - 1), xs[:len(fx)], backend)
    return add_coords(p, fx, neg_coords(p, scaled, backend, cache), backend, cache)


def t_a_coords(p, a, xs, backend, cache=None):
    cache = cache or default_cache
    values = _padded(a[:len(xs)], backend) + _padded(xs, backend)
    return [evaluate_terms(cache.compiled(p, "t_a", i), values, backend) for i in range(len(xs))]


# -- Witt vectors ---------------------------------------------------------------

@dataclass(frozen=True)
class GhostVector:
    p: int
    ring: Ring
    values: Tuple

    def __len__(self):
        return len(self.values)


class WittVector:
    """
    Element of W_n(A) for the prime p: a tuple of n coordinates in one ring.
    Operators +, -, * use the cached universal structure polynomials.
    """

    __slots__ = ("p", "ring", "coords")

    def __init__(self, p: int, ring: Ring, coords: Sequence):
        if len(coords) < 1:
            raise LengthMismatch("a Witt vector needs at least one coordinate")
        self.p = p
        self.ring = ring
        self.coords = tuple(ring.coerce(c) for c in coords)

    @classmethod
    def zero(cls, p: int, ring: Ring, n: int) -> "WittVector":
        return cls(p, ring, [ring.zero] * n)

    @classmethod
    def one(cls, p: int, ring: Ring, n: int) -> "WittVector":
        return teichmuller(ring.one, n, p, ring)

    def __len__(self):
        return len(self.coords)

    @property
    def length(self) -> int:
        return len(self.coords)

    def truncate(self, n: int) -> "WittVector":
        if n > self.length:
            raise LengthMismatch(f"cannot truncate length {self.length} to {n}")
        return WittVector(self.p, self.ring, self.coords[:n])

    def _backend(self) -> Backend:
        return Backend(self.ring)

    def __add__(self, other):
        return witt_add(self, other)

    def __sub__(self, other):
        return witt_add(self, witt_neg(other))

    def __neg__(self):
        return witt_neg(self)

    def __mul__(self, other):
        return witt_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return (self.p == other.p and self.ring is other.ring and self.length == other.length
                and all(a == b for a, b in zip(self.coords, other.coords)))

    def __hash__(self):
        return hash((self.p, self.coords))

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(c) for c in self.coords)

    def to_text(self) -> str:
        return "(" + ", ".join(self.ring.to_text(c) for c in self.coords) + ")"

    def __repr__(self):
        return f"W{self.length}[p={self.p}]{self.to_text()}"


def _check_pair(x: WittVector, y: WittVector):
    if x.p != y.p:
        raise RingMismatch(f"primes differ: {x.p} and {y.p}")
    if x.ring is not y.ring:
        raise RingMismatch(f"rings differ: {x.ring} and {y.ring}")
    if x.length != y.length:
        raise LengthMismatch(f"lengths differ: {x.length} and {y.length}")


def symbolic_vector(p: int, ring: Ring, prefix: str, n: int) -> WittVector:
    """Vector (prefix0, ..., prefix{n-1}) of generators of a polynomial ring."""
    gens = ring.gens
    return WittVector(p, ring, [gens[f"{prefix}{i}"] for i in range(n)])


def ghost(x: WittVector) -> GhostVector:
    backend = x._backend()
    return GhostVector(x.p, x.ring, tuple(ghost_component(x.p, x.coords, i, backend)
                                          for i in range(x.length)))


def ghost_invert(w: GhostVector) -> WittVector:
    """Witt vector with ghost components w; needs a p-torsion-free ring."""
    ring, p = w.ring, w.p
    if not ring.p_torsion_free:
        raise NotIntegral(f"ghost inversion needs a {p}-torsion-free ring, got {ring}")
    backend = Backend(ring)
    coords: List = []
    for i, value in enumerate(w.values):
        residual = ring.coerce(value)
        for j in range(i):
            residual = residual - backend.scale(backend.power(coords[j], p ** (i - j)), p ** j)
        try:
            coords.append(ring.exact_div(residual, ring.from_int(p ** i)))
        except (NotDivisible, AmbiguousQuotient) as exc:
            raise NotIntegral(f"ghost component {i} forces a non-integral coordinate") from exc
    return WittVector(p, ring, coords)


def witt_add(x: WittVector, y: WittVector, cache: Optional[StructureCache] = None) -> WittVector:
    _check_pair(x, y)
    return WittVector(x.p, x.ring, add_coords(x.p, x.coords, y.coords, x._backend(), cache))


def witt_mul(x: WittVector, y: WittVector, cache: Optional[StructureCache] = None) -> WittVector:
    _check_pair(x, y)
    return WittVector(x.p, x.ring, mul_coords(x.p, x.coords, y.coords, x._backend(), cache))


def witt_neg(x: WittVector, cache: Optional[StructureCache] = None) -> WittVector:
    return WittVector(x.p, x.ring, neg_coords(x.p, x.coords, x._backend(), cache))


def scalar_multiple(k: int, x: WittVector) -> WittVector:
    """k * x as a repeated Witt sum (double and add)."""
    if k < 0:
        return witt_neg(scalar_multiple(-k, x))
    result, base = WittVector.zero(x.p, x.ring, x.length), x
    while k:
        if k & 1:
            result = witt_add(result, base)
        k >>= 1
        if k:
            base = witt_add(base, base)
    return result


def frobenius(x: WittVector) -> WittVector:
    if x.length < 2:
        raise LengthMismatch("Frobenius needs length n+1 >= 2")
    return WittVector(x.p, x.ring, frobenius_coords(x.p, x.coords, x._backend()))


def verschiebung(x: WittVector) -> WittVector:
    return WittVector(x.p, x.ring, (x.ring.zero,) + x.coords[:-1])


def teichmuller(lam, n: int, p: int, ring: Ring) -> WittVector:
    return WittVector(p, ring, [lam] + [ring.zero] * (n - 1))


def teich_scale(lam, x: WittVector) -> WittVector:
    """[lam] * x, i.e. coordinates lam^(p^i) x_i."""
    lam = x.ring.coerce(lam)
    return WittVector(x.p, x.ring, teich_scale_coords(x.p, lam, x.coords, x._backend()))


def f_lambda(x: WittVector, lam) -> WittVector:
    """F^(lam)(x) = F(x) - [lam^(p-1)] x, from length n+1 to n."""
    if x.length < 2:
        raise LengthMismatch("F^(lam) needs length n+1 >= 2")
    lam = x.ring.coerce(lam)
    return WittVector(x.p, x.ring, f_lambda_coords(x.p, x.coords, lam, x._backend()))


def t_a(a: WittVector, x: WittVector) -> WittVector:
    if a.p != x.p:
        raise RingMismatch(f"primes differ: {a.p} and {x.p}")
    if a.ring is not x.ring:
        raise RingMismatch(f"rings differ: {a.ring} and {x.ring}")
    if a.length < x.length:
        raise LengthMismatch(f"T_a needs len(a) >= len(x), got {a.length} < {x.length}")
    return WittVector(x.p, x.ring, t_a_coords(x.p, a.coords, x.coords, x._backend()))


def t_a_prime(a: WittVector, x: WittVector, lam) -> WittVector:
    """T'_a = F^(lam) o T_a."""
    return f_lambda(t_a(a, x), lam)


# -- the vector p^l [lam] ----------------------------------------------------

@dataclass(frozen=True)
class PowerTeichmuller:
    """p^l [lam] over Z[lam] with the rational sequence alpha of its closed form."""
    p: int
    l: int
    b: WittVector
    alpha: Tuple[Fraction, ...]
    congruences: Tuple[bool, ...]


def alpha_sequence(p: int, l: int, n: int) -> List[Fraction]:
    """alpha_0 = 1, alpha_k = 1 - p^((p^k-1)l) - sum_{0<i<k} p^((p^(k-i)-1)(l-i)) alpha_i^(p^(k-i))."""
    alpha = [Fraction(1)]
    for k in range(1, n):
        value = Fraction(1) - Fraction(p) ** ((p ** k - 1) * l)
        for i in range(1, k):
            value -= Fraction(p) ** ((p ** (k - i) - 1) * (l - i)) * alpha[i] ** (p ** (k - i))
        alpha.append(value)
    return alpha


def p_power_teichmuller(p: int, l: int, n: int) -> PowerTeichmuller:
    """
    b = p^l [lam] in W_n(Z[lam]), computed as an iterated Witt sum and
    compared against b_k = p^(l-k) lam^(p^k) alpha_k.  Also records the
    congruences b_k = lam^(p^l) (k = l) and b_k = 0 (k != l) modulo p.
    """
    if n < 1:
        raise LengthMismatch("depth must be at least 1")
    ring = make_ring(RingDescriptor.polynomial(RingDescriptor.integers(), ["lam"]))
    lam = ring.gens["lam"]
    b = scalar_multiple(p ** l, teichmuller(lam, n, p, ring))
    alpha = alpha_sequence(p, l, n)
    congruences = []
    for k in range(n):
        coeff = Fraction(p) ** (l - k) * alpha[k]
        if coeff.denominator != 1:
            raise MismatchWithClosedForm(f"b_{k} closed-form coefficient {coeff} is not an integer")
        closed = ring.from_int(coeff.numerator) * lam ** (p ** k)
        if b.coords[k] != closed:
            raise MismatchWithClosedForm(
                f"b_{k}: Witt sum gives {ring.to_text(b.coords[k])}, closed form {ring.to_text(closed)}")
        expected = 1 if k == l else 0
        congruences.append((coeff.numerator - expected) % p == 0)
    if not all(congruences):
        raise MismatchWithClosedForm(
            f"congruence mod {p} fails at k={congruences.index(False)} for l={l}")
    logger.debug("p^l[lam] for p=%d l=%d n=%d: %s", p, l, n, b.to_text())
    return PowerTeichmuller(p, l, b, tuple(alpha), tuple(congruences))


# -- batches over finite rings ---------------------------------------------

class WittBatch:
    """
    Every vector of W_n(A) for a finite ring A at once, as columns of
    element indices; operators run through the ring's Cayley tables.
    """

    def __init__(self, p: int, ring: Ring, length: int, cache: Optional[StructureCache] = None):
        self.p = p
        self.ring = ring
        self.length = length
        self.tables = cayley_tables(ring)
        size = len(self.tables.elements)
        self.count = size ** length
        grid = np.indices((size,) * length).reshape(length, -1)
        self.columns = [grid[i].astype(np.int64) for i in range(length)]
        self.backend = TableBackend(self.tables, self.count)
        self.cache = cache

    def constant_vector(self, x: WittVector) -> List[np.ndarray]:
        return [self.backend.constant(c) for c in x.coords]

    def frobenius(self, cols):
        return frobenius_coords(self.p, cols, self.backend, self.cache)

    def f_lambda(self, cols, lam):
        return f_lambda_coords(self.p, cols, self.backend.constant(lam), self.backend, self.cache)

    def t_a(self, a: WittVector, cols):
        return t_a_coords(self.p, self.constant_vector(a), cols, self.backend, self.cache)

    def add(self, xs, ys):
        return add_coords(self.p, xs, ys, self.backend, self.cache)

    def kernel_mask(self, cols) -> np.ndarray:
        zero = self.tables.zero_index
        mask = np.ones(self.count, dtype=bool)
        for c in cols:
            mask &= c == zero
        return mask

    def row_keys(self, cols) -> np.ndarray:
        """One integer per vector encoding its coordinates; equal keys mean equal vectors."""
        size = len(self.tables.elements)
        key = np.zeros(self.count, dtype=np.int64)
        for c in cols:
            key = key * size + c
        return key

    def vector(self, row: int) -> WittVector:
        elements = self.tables.elements
        return WittVector(self.p, self.ring, [elements[c[row]] for c in self.columns])

"""Concrete abelian semigroups with counting measure.

Three families are supported:

* ``ZPlus(d)``   -- additive multi-indices of length ``d``,
* ``NStar()``    -- positive integers under multiplication,
* ``FreeAbelian(norms)`` -- the free abelian semigroup on generators with
  prescribed real norms ``> 1``.

On top of the element arithmetic the module provides weights (positive
submultiplicative evaluation rules), semicharacters (multiplicative complex
evaluation rules) and the sampled membership checks that feed the convolution
algebra: ``check_submultiplicative`` and ``check_in_spectrum``.

Elements are plain immutable values: ``int`` for ``NStar``, a tuple of
non-negative ints for ``ZPlus``, and a sorted tuple of ``(generator, exponent)``
pairs for ``FreeAbelian``.  Every operation is a pure function, so everything
here is safe to use from multiple threads.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError, EnumerationCapError, HorizonError, ModelMismatchError

INT64_MAX = 2**63 - 1

# Relative slack used by all multiplicative identity checks; double round-off
# across <= 60 multiplications stays well below this.
MULTIPLICATIVE_RTOL = 1e-12

_DEFAULT_CAP = 2_000_000


# ---------------------------------------------------------------------------
# semigroup models
# ---------------------------------------------------------------------------


class Semigroup:
    """Common interface of the three concrete families."""

    family: str = "abstract"

    def unit(self):
        raise NotImplementedError

    def validate(self, a) -> None:
        raise NotImplementedError

    def compose(self, a, b):
        raise NotImplementedError

    def try_divide(self, t, s):
        """Return r with s*r = t, or None if s does not divide t."""
        raise NotImplementedError

    def norm(self, a) -> float:
        """Grading used for horizons and exhaustions (n itself on NStar)."""
        raise NotImplementedError

    def sort_key(self, a):
        """Total order: by norm, then lexicographically."""
        raise NotImplementedError

    def elements_up_to(self, bound, cap: int = _DEFAULT_CAP) -> list:
        """All elements of norm <= bound, sorted by ``sort_key``."""
        raise NotImplementedError

    def factorize(self, a):
        """Exponent vector of ``a`` over the prime elements, as sorted pairs."""
        raise DomainError(f"factorize is not defined on family {self.family!r}")

    def same_family(self, other: "Semigroup") -> bool:
        return type(self) is type(other) and self.family == other.family

    def require_same(self, other: "Semigroup") -> None:
        if not self.same_family(other):
            raise ModelMismatchError(f"model mismatch: {self.family!r} vs {other.family!r}")


class NStar(Semigroup):
    """Multiplicative semigroup of positive integers, counting measure.

    Factorization uses a cached smallest-prime-factor sieve (grown on demand)
    and falls back to trial division beyond the sieve range.  Composition is
    guarded against leaving the 64-bit range so downstream index arithmetic
    never wraps.
    """

    family = "nstar"

    def __init__(self):
        self._spf = None  # lazily built smallest-prime-factor table

    def unit(self) -> int:
        return 1

    def validate(self, a) -> None:
        if not isinstance(a, int) or isinstance(a, bool) or a < 1:
            raise DomainError(f"NStar element must be an integer >= 1, got {a!r}")
        if a > INT64_MAX:
            raise OverflowError(f"NStar element {a} exceeds the 64-bit representation")

    def compose(self, a: int, b: int) -> int:
        v = a * b
        if v > INT64_MAX:
            raise OverflowError(f"product {a} * {b} exceeds the 64-bit representation")
        return v

    def try_divide(self, t: int, s: int):
        return t // s if t % s == 0 else None

    def norm(self, a: int) -> float:
        return float(a)

    def sort_key(self, a: int):
        return a

    def elements_up_to(self, bound, cap: int = _DEFAULT_CAP) -> list:
        n = int(math.floor(bound))
        if n > cap:
            raise EnumerationCapError(f"{n} elements requested, cap is {cap}")
        return list(range(1, n + 1))

    def _spf_table(self, limit: int):
        from . import kernels

        if self._spf is None or len(self._spf) <= limit:
            self._spf = kernels.smallest_prime_factor(max(limit, 1024))
        return self._spf

    def primes_up_to(self, limit: int) -> list[int]:
        spf = self._spf_table(limit)
        return [p for p in range(2, limit + 1) if spf[p] == p]

    def factorize(self, a: int) -> tuple[tuple[int, int], ...]:
        self.validate(a)
        pairs = []
        n = a
        if n <= 10**6 or self._spf is not None and len(self._spf) > n:
            spf = self._spf_table(n)
            while n > 1:
                p = int(spf[n])
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                pairs.append((p, e))
        else:
            # trial division; fine at desk scale
            d = 2
            while d * d <= n:
                if n % d == 0:
                    e = 0
                    while n % d == 0:
                        n //= d
                        e += 1
                    pairs.append((d, e))
                d += 1 if d == 2 else 2
            if n > 1:
                pairs.append((n, 1))
        return tuple(pairs)


class ZPlus(Semigroup):
    """Additive semigroup of multi-indices of fixed length ``d``."""

    family = "zplus"

    def __init__(self, d: int = 1):
        if d < 1:
            raise DomainError("dimension must be >= 1")
        self.d = d
        self.family = f"zplus({d})"

    def unit(self) -> tuple:
        return (0,) * self.d

    def validate(self, a) -> None:
        if not isinstance(a, tuple) or len(a) != self.d:
            raise DomainError(f"ZPlus({self.d}) element must be a tuple of length {self.d}")
        for x in a:
            if not isinstance(x, int) or isinstance(x, bool) or x < 0:
                raise DomainError(f"multi-index components must be integers >= 0, got {a!r}")
            if x > INT64_MAX:
                raise OverflowError(f"component {x} exceeds the 64-bit representation")

    def compose(self, a: tuple, b: tuple) -> tuple:
        out = tuple(x + y for x, y in zip(a, b))
        for x in out:
            if x > INT64_MAX:
                raise OverflowError("multi-index sum exceeds the 64-bit representation")
        return out

    def try_divide(self, t: tuple, s: tuple):
        out = tuple(x - y for x, y in zip(t, s))
        return out if all(x >= 0 for x in out) else None

    def norm(self, a: tuple) -> float:
        return float(sum(a))

    def sort_key(self, a: tuple):
        return (sum(a), a)

    def elements_up_to(self, bound, cap: int = _DEFAULT_CAP) -> list:
        g = int(math.floor(bound))
        count = math.comb(g + self.d, self.d)
        if count > cap:
            raise EnumerationCapError(f"{count} elements up to degree {g}, cap is {cap}")
        out = []
        for total in range(g + 1):
            out.extend(_compositions(total, self.d))
        return out


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative ints summing to ``total``, lex order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class FreeAbelian(Semigroup):
    """Free abelian semigroup on generators with real norms ``> 1``.

    Elements are canonical sorted tuples of ``(generator_index, exponent)``
    with strictly positive exponents; the norm is multiplicative over the
    generators.
    """

    family = "free-abelian"

    def __init__(self, norms: Iterable[float]):
        norms = tuple(float(x) for x in norms)
        for x in norms:
            if not x > 1.0:
                raise DomainError(f"generator norms must exceed 1, got {x}")
        self.norms = norms
        self.family = f"free-abelian{norms}"

    def unit(self) -> tuple:
        return ()

    def validate(self, a) -> None:
        if not isinstance(a, tuple):
            raise DomainError("FreeAbelian element must be a tuple of (generator, exponent) pairs")
        last = -1
        for item in a:
            if not (isinstance(item, tuple) and len(item) == 2):
                raise DomainError(f"malformed exponent pair {item!r}")
            i, e = item
            if not (isinstance(i, int) and 0 <= i < len(self.norms)):
                raise DomainError(f"generator index {i!r} out of range")
            if not (isinstance(e, int) and e >= 1):
                raise DomainError(f"exponents must be integers >= 1, got {e!r}")
            if i <= last:
                raise DomainError("exponent pairs must be sorted by generator with no repeats")
            last = i

    def element(self, exponents: Mapping[int, int]) -> tuple:
        """Canonical element from a {generator: exponent} mapping."""
        a = tuple(sorted((i, e) for i, e in exponents.items() if e != 0))
        self.validate(a)
        return a

    def compose(self, a: tuple, b: tuple) -> tuple:
        acc = dict(a)
        for i, e in b:
            acc[i] = acc.get(i, 0) + e
        return tuple(sorted(acc.items()))

    def try_divide(self, t: tuple, s: tuple):
        acc = dict(t)
        for i, e in s:
            r = acc.get(i, 0) - e
            if r < 0:
                return None
            if r == 0:
                del acc[i]
            else:
                acc[i] = r
        return tuple(sorted(acc.items()))

    def norm(self, a: tuple) -> float:
        v = 1.0
        for i, e in a:
            v *= self.norms[i] ** e
        return v

    def _dense(self, a: tuple) -> tuple:
        out = [0] * len(self.norms)
        for i, e in a:
            out[i] = e
        return tuple(out)

    def sort_key(self, a: tuple):
        return (self.norm(a), self._dense(a))

    def elements_up_to(self, bound, cap: int = _DEFAULT_CAP) -> list:
        out = []

        # depth-first over ascending generator indices, then sort by (norm, lex)
        def rec(i: int, prefix: tuple, prefix_norm: float):
            if len(out) > cap:
                raise EnumerationCapError(f"more than {cap} elements of norm <= {bound}")
            if i == len(self.norms):
                out.append(prefix)
                return
            rec(i + 1, prefix, prefix_norm)
            nv = prefix_norm * self.norms[i]
            e = 1
            while nv <= bound:
                rec(i + 1, prefix + ((i, e),), nv)
                e += 1
                nv *= self.norms[i]

        if bound >= 1.0:
            rec(0, (), 1.0)
        out.sort(key=self.sort_key)
        return out

    def factorize(self, a: tuple) -> tuple:
        self.validate(a)
        return a


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantOne:
    """w(s) = 1."""


@dataclass(frozen=True)
class ExponentialOfIndex:
    """w(alpha) = exp(rates . alpha) on multi-indices; multiplicative, so
    submultiplicativity holds with equality."""

    rates: tuple[float, ...]

    def __init__(self, rates):
        if isinstance(rates, (int, float)):
            rates = (float(rates),)
        object.__setattr__(self, "rates", tuple(float(r) for r in rates))


@dataclass(frozen=True)
class PowerOfInteger:
    """w(n) = n**exponent on the multiplicative integers (a positive
    semicharacter when used as the density rho)."""

    exponent: float


@dataclass(frozen=True)
class TabulatedWeight:
    """Explicit positive table of values; evaluation beyond the table raises
    HorizonError."""

    values: Mapping
    horizon: float

    def __post_init__(self):
        for s, v in self.values.items():
            if not v > 0.0:
                raise DomainError(f"weight values must be positive, got w({s!r}) = {v!r}")


Weight = ConstantOne | ExponentialOfIndex | PowerOfInteger | TabulatedWeight


def eval_weight(w: Weight, s) -> float:
    """Evaluate a weight at an element of its semigroup."""
    if isinstance(w, ConstantOne):
        return 1.0
    if isinstance(w, PowerOfInteger):
        return float(s) ** w.exponent
    if isinstance(w, ExponentialOfIndex):
        if not isinstance(s, tuple) or len(s) != len(w.rates):
            raise DomainError(f"ExponentialOfIndex expects a multi-index of length {len(w.rates)}")
        return math.exp(sum(r * x for r, x in zip(w.rates, s)))
    if isinstance(w, TabulatedWeight):
        try:
            return float(w.values[s])
        except KeyError:
            raise HorizonError(f"weight not tabulated at {s!r} (horizon {w.horizon})") from None
    raise DomainError(f"unknown weight kind {type(w).__name__}")


def weight_array(w: Weight, model: Semigroup, horizon) -> np.ndarray:
    """Vector of w over the index range 1..B (NStar) or 0..B (ZPlus(1)).

    Used by the dense kernel paths; slot 0 of the NStar array is unused and
    set to 1.
    """
    b = int(math.floor(horizon))
    if isinstance(model, NStar):
        n = np.arange(0, b + 1, dtype=np.float64)
        n[0] = 1.0
        if isinstance(w, ConstantOne):
            return np.ones(b + 1)
        if isinstance(w, PowerOfInteger):
            return n**w.exponent
        if isinstance(w, TabulatedWeight):
            return np.array([1.0] + [eval_weight(w, k) for k in range(1, b + 1)])
        raise DomainError(f"weight kind {type(w).__name__} not usable on NStar")
    if isinstance(model, ZPlus) and model.d == 1:
        if isinstance(w, ConstantOne):
            return np.ones(b + 1)
        if isinstance(w, ExponentialOfIndex):
            return np.exp(w.rates[0] * np.arange(0, b + 1, dtype=np.float64))
        return np.array([eval_weight(w, (k,)) for k in range(0, b + 1)])
    raise DomainError("weight_array is only defined for the rank-one families")


# ---------------------------------------------------------------------------
# semicharacters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointCharacter:
    """psi(alpha) = z**alpha on multi-indices, componentwise, with 0**0 = 1."""

    point: tuple[complex, ...]

    def __init__(self, point):
        if isinstance(point, (int, float, complex)):
            point = (complex(point),)
        object.__setattr__(self, "point", tuple(complex(z) for z in point))


@dataclass(frozen=True)
class PrimePowerCharacter:
    """psi(n) = rho(n) * prod z_p**e_p over the factorization of n.

    ``rho`` is the positive multiplicative part; unlisted primes evaluate to
    ``default``.  With |z_p| <= 1 everywhere this exhausts the semicharacters
    dominated by rho.
    """

    rho: Weight
    prime_values: Mapping[int, complex]
    default: complex = 1.0 + 0j


@dataclass(frozen=True)
class IntegerPowerCharacter:
    """psi(n) = n**(-s) on the multiplicative integers."""

    s: complex


@dataclass(frozen=True)
class GeneratorCharacter:
    """Free abelian semicharacter from one complex value per generator."""

    values: tuple[complex, ...]


Semicharacter = PointCharacter | PrimePowerCharacter | IntegerPowerCharacter | GeneratorCharacter


def eval_semicharacter(psi: Semicharacter, s, model: Semigroup | None = None) -> complex:
    """Evaluate a semicharacter at an element; multiplicative by construction."""
    if isinstance(psi, PointCharacter):
        v = 1.0 + 0j
        for z, e in zip(psi.point, s):
            if e:
                v *= z**e
        return v
    if isinstance(psi, IntegerPowerCharacter):
        if s == 1:
            return 1.0 + 0j
        return cmath.exp(-psi.s * math.log(s))
    if isinstance(psi, PrimePowerCharacter):
        if model is None:
            model = _SHARED_NSTAR
        v = complex(eval_weight(psi.rho, s))
        for p, e in model.factorize(s):
            zp = complex(psi.prime_values.get(p, psi.default))
            v *= zp**e
        return v
    if isinstance(psi, GeneratorCharacter):
        v = 1.0 + 0j
        for i, e in s:
            v *= complex(psi.values[i]) ** e
        return v
    raise DomainError(f"unknown semicharacter kind {type(psi).__name__}")


_SHARED_NSTAR = NStar()


# ---------------------------------------------------------------------------
# sampled checks
# ---------------------------------------------------------------------------


def sample_elements(model: Semigroup, count: int, seed: int = 0) -> list:
    """Deterministic sample: the first ``count`` elements in enumeration order."""
    if count < 1:
        raise DomainError("sample budget must be >= 1")
    if isinstance(model, NStar):
        return model.elements_up_to(count)
    bound = 2.0
    while True:
        try:
            elems = model.elements_up_to(bound)
        except EnumerationCapError:
            elems = model.elements_up_to(bound, cap=10 * _DEFAULT_CAP)
        if len(elems) >= count or isinstance(model, FreeAbelian) and bound > 2.0**40:
            return elems[:count]
        bound *= 2.0


def sample_pairs(model: Semigroup, count: int, seed: int = 0) -> list[tuple]:
    """Deterministic pair sample: all pairs from a short prefix, then seeded
    random pairs from a longer prefix until ``count`` is reached."""
    if count < 1:
        raise DomainError("sample budget must be >= 1")
    m = max(2, int(math.isqrt(2 * count)) + 1)
    base = sample_elements(model, max(m, min(count, 64)), seed)
    pairs = []
    prefix = base[: min(m, len(base))]
    for i, a in enumerate(prefix):
        for b in prefix[i:]:
            pairs.append((a, b))
            if len(pairs) >= count:
                return pairs
    rng = random.Random(seed)
    while len(pairs) < count:
        a = base[rng.randrange(len(base))]
        b = base[rng.randrange(len(base))]
        pairs.append((a, b))
    return pairs


@dataclass
class ViolatingPair:
    s: object
    t: object
    lhs: float  # w(st)
    rhs: float  # w(s) * w(t)


def check_submultiplicative(
    w: Weight, model: Semigroup, sample_budget: int, seed: int = 0
) -> list[ViolatingPair]:
    """Report every sampled pair with w(st) > w(s)w(t) up to relative slack.

    An empty list means the weight passed on the sampled pairs.  Pairs whose
    product falls outside a tabulated weight's horizon are skipped.
    """
    violations = []
    for s, t in sample_pairs(model, sample_budget, seed):
        st = model.compose(s, t)
        try:
            lhs = eval_weight(w, st)
            rhs = eval_weight(w, s) * eval_weight(w, t)
        except HorizonError:
            continue
        if lhs > rhs * (1.0 + MULTIPLICATIVE_RTOL):
            violations.append(ViolatingPair(s, t, lhs, rhs))
    return violations


@dataclass
class MembershipReport:
    passed: bool
    witness: object = None
    psi_abs: float = 0.0
    weight_value: float = 0.0


def check_in_spectrum(
    psi: Semicharacter,
    w: Weight,
    model: Semigroup,
    sample_budget: int,
    seed: int = 0,
) -> MembershipReport:
    """Sampled membership of psi in the weighted spectrum: |psi(s)| <= w(s)."""
    for s in sample_elements(model, sample_budget, seed):
        try:
            wv = eval_weight(w, s)
        except HorizonError:
            continue
        pv = abs(eval_semicharacter(psi, s, model))
        if pv > wv * (1.0 + MULTIPLICATIVE_RTOL):
            return MembershipReport(False, s, pv, wv)
    return MembershipReport(True)

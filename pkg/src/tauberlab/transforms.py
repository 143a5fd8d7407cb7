"""Series transforms of algebra elements at semicharacters.

Power series on the additive integers, Dirichlet series on the multiplicative
integers, and the generic semigroup Laplace transform, all returned as
:class:`SeriesValue` carrying a certified truncation radius.  Claims about a
full (infinite) series are only as good as the supplied tail descriptor, so
every entry point takes one; finitely supported elements get radius zero.

Two evaluation conventions are exposed: :func:`laplace` pairs the element with
the *conjugated* semicharacter, :func:`gelfand_eval` evaluates at the point
itself.  The semicharacter set is closed under conjugation, so both describe
the same transform up to the parametrization of the evaluation point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement
from .errors import DomainError, HalfPlaneError
from .semigroups import (
    ConstantOne,
    NStar,
    PowerOfInteger,
    Semicharacter,
    Semigroup,
    TabulatedWeight,
    Weight,
    ZPlus,
    eval_semicharacter,
    eval_weight,
)

# ---------------------------------------------------------------------------
# tail descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinitelySupported:
    """The stored coefficients are all of them; truncation radius 0."""

    def series_tail(self, horizon: float, factor: float = 1.0) -> float:
        return 0.0

    def derivative_tail(self, horizon: float, radius: float) -> float:
        return 0.0


@dataclass(frozen=True)
class GeometricBound:
    """Coefficient-wise bound |k(s)| w(s) <= scale * ratio**norm(s).

    Only meaningful on the rank-one families (one element per integer norm),
    where the discarded mass beyond horizon B is at most
    ``scale * ratio**(B+1) / (1 - ratio)``.
    """

    ratio: float
    scale: float

    def __post_init__(self):
        if not 0.0 <= self.ratio < 1.0:
            raise DomainError(f"geometric ratio must lie in [0, 1), got {self.ratio}")
        if self.scale < 0.0:
            raise DomainError("geometric scale must be non-negative")

    def series_tail(self, horizon: float, factor: float = 1.0) -> float:
        x = self.ratio * factor
        if not 0.0 <= x < 1.0:
            raise DomainError(f"geometric tail invalid at evaluation factor {factor}")
        b = int(math.floor(horizon))
        return self.scale * x ** (b + 1) / (1.0 - x)

    def derivative_tail(self, horizon: float, radius: float) -> float:
        """Bound on sum_{n > B} n |k(n)| radius**(n-1), for Lipschitz budgets."""
        x = self.ratio * radius
        if not 0.0 <= x < 1.0:
            raise DomainError(f"geometric tail invalid at radius {radius}")
        b = int(math.floor(horizon))
        s = ((b + 1) * x**b * (1.0 - x) + x ** (b + 1)) / (1.0 - x) ** 2
        return self.scale * self.ratio * s


@dataclass(frozen=True)
class ExplicitBound:
    """Caller-supplied bound on the discarded weighted mass."""

    value: float

    def __post_init__(self):
        if self.value < 0.0:
            raise DomainError("tail bound must be non-negative")

    def series_tail(self, horizon: float, factor: float = 1.0) -> float:
        if factor > 1.0:
            raise DomainError("explicit tail bounds only cover dominated evaluation (factor <= 1)")
        return self.value

    def derivative_tail(self, horizon: float, radius: float) -> float:
        raise DomainError("explicit tail bounds carry no derivative information")


TailDescriptor = FinitelySupported | GeometricBound | ExplicitBound


@dataclass(frozen=True)
class SeriesValue:
    """A computed series value with a certified enclosure radius."""

    value: complex
    tail_radius: float

    def __post_init__(self):
        if not (math.isfinite(self.tail_radius) and self.tail_radius >= 0.0):
            raise DomainError("tail radius must be finite and non-negative")


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def laplace(
    k: AlgebraElement,
    psi: Semicharacter,
    tail: TailDescriptor = FinitelySupported(),
) -> SeriesValue:
    """Transform sum_s k(s) conj(psi(s)), plus the unit scalar."""
    acc = complex(k.unit_scalar)
    model = k.model
    for s in k.support():
        acc += k.coeffs[s] * eval_semicharacter(psi, s, model).conjugate()
    return SeriesValue(acc, tail.series_tail(k.horizon))


def gelfand_eval(
    k: AlgebraElement,
    psi: Semicharacter,
    tail: TailDescriptor = FinitelySupported(),
) -> SeriesValue:
    """Evaluation sum_s k(s) psi(s) at the point itself (no conjugation)."""
    acc = complex(k.unit_scalar)
    model = k.model
    for s in k.support():
        acc += k.coeffs[s] * eval_semicharacter(psi, s, model)
    return SeriesValue(acc, tail.series_tail(k.horizon))


def power_series(
    k: AlgebraElement,
    z: complex,
    tail: TailDescriptor = FinitelySupported(),
) -> SeriesValue:
    """sum_n k(n) z**n for an element of the additive integer semigroup."""
    if not (isinstance(k.model, ZPlus) and k.model.d == 1):
        raise DomainError("power_series requires a ZPlus(1) element")
    z = complex(z)
    acc = complex(k.unit_scalar)
    for s in k.support():
        n = s[0]
        acc += k.coeffs[s] * (z**n if n else 1.0)
    return SeriesValue(acc, tail.series_tail(k.horizon, abs(z)))


def _rho_values(rho: Weight, ns: np.ndarray) -> np.ndarray:
    if isinstance(rho, ConstantOne):
        return np.ones(len(ns))
    if isinstance(rho, PowerOfInteger):
        return ns.astype(np.float64) ** rho.exponent
    if isinstance(rho, TabulatedWeight):
        return np.array([eval_weight(rho, int(n)) for n in ns])
    raise DomainError(f"weight kind {type(rho).__name__} is not a positive density on NStar")


def dirichlet_series(
    k: AlgebraElement,
    rho: Weight,
    s: complex,
    tail: TailDescriptor = FinitelySupported(),
) -> SeriesValue:
    """sum_n k(n) rho(n) n**(-s) on the closed right half-plane.

    The tail radius is uniform in s there, since |n**(-s)| <= 1.
    """
    if not isinstance(k.model, NStar):
        raise DomainError("dirichlet_series requires an NStar element")
    s = complex(s)
    if s.real < 0.0:
        raise HalfPlaneError(f"Re s must be >= 0, got {s!r}")
    support = k.support()
    acc = complex(k.unit_scalar)
    if support:
        ns = np.array(support, dtype=np.int64)
        coef = np.array([k.coeffs[n] for n in support], dtype=np.complex128)
        vals = coef * _rho_values(rho, ns) * np.exp(-s * np.log(ns.astype(np.float64)))
        acc += complex(np.sum(vals))
    return SeriesValue(acc, tail.series_tail(k.horizon))


@dataclass
class SpectralRadiusBound:
    """min over 1 <= n <= n_max of w(n)**(1/n), with attainment diagnostics."""

    value: float
    attained_at: int
    still_decreasing: bool  # the sequence was still going down at n_max


def spectral_radius_bound(w: Weight, n_max: int) -> SpectralRadiusBound:
    """Disk radius bound from the weight's root sequence on the additive integers."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    best = math.inf
    best_at = 0
    prev = None
    decreasing_at_end = False
    for n in range(1, n_max + 1):
        v = eval_weight(w, (n,)) ** (1.0 / n)
        if v < best:
            best = v
            best_at = n
        decreasing_at_end = prev is not None and v < prev
        prev = v
    return SpectralRadiusBound(best, best_at, decreasing_at_end and best_at == n_max)

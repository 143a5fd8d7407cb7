"""Weighted convolution algebra over a concrete semigroup.

``AlgebraElement`` is a finitely supported coefficient function plus a formal
unit scalar (the unitization ``lambda * u + k``); ``BoundedFunction`` is a
total function on the enumeration prefix up to a horizon.  Convolutions are
*exact* inside the horizon: on the supported families the value at ``t``
depends only on factor pairs of ``t``, all of which lie inside the horizon,
so truncation introduces no error at retained points.

Coefficients are stored sparsely; convolutions switch to dense integer-indexed
kernel arrays (see :mod:`tauberlab.kernels`) once the support product makes
the divisor-pair sweep cheaper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import kernels
from .errors import DomainError, HorizonError, ModelMismatchError, NeumannConvergenceError
from .semigroups import NStar, Semigroup, Weight, ZPlus, eval_weight, weight_array

# Above this support product the dense integer-indexed kernel beats the
# sparse pair sweep.
_DENSE_CUTOFF = 4096


def _is_rank_one(model: Semigroup) -> bool:
    return isinstance(model, NStar) or (isinstance(model, ZPlus) and model.d == 1)


def _index_of(model: Semigroup, s) -> int:
    # integer index used by the dense kernels (n on NStar, the component on ZPlus)
    return s if isinstance(model, NStar) else s[0]


def _element_of(model: Semigroup, i: int):
    return i if isinstance(model, NStar) else (i,)


@dataclass(frozen=True)
class AlgebraElement:
    """Unitized, finitely supported coefficient function.

    ``coeffs`` maps semigroup elements to complex coefficients; ``unit_scalar``
    is the coefficient of the formal unit.  ``horizon`` is the norm bound
    inside which coefficients (and any convolution of such elements) are
    meaningful; reading beyond it raises :class:`HorizonError`.
    """

    model: Semigroup
    coeffs: dict
    unit_scalar: complex = 0j
    horizon: float = 0.0

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_coefficients(
        cls,
        model: Semigroup,
        coeffs: Mapping,
        horizon,
        unit_scalar: complex = 0j,
        _validated: bool = False,
    ) -> "AlgebraElement":
        cleaned = {}
        for s, v in coeffs.items():
            v = complex(v)
            if v == 0:
                continue
            if not _validated:
                model.validate(s)
                if model.norm(s) > horizon:
                    raise DomainError(f"support element {s!r} lies beyond horizon {horizon}")
                if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                    raise DomainError(f"coefficient at {s!r} is not finite")
            cleaned[s] = v
        return cls(model, cleaned, complex(unit_scalar), horizon)

    @classmethod
    def zero(cls, model: Semigroup, horizon) -> "AlgebraElement":
        return cls(model, {}, 0j, horizon)

    @classmethod
    def unit(cls, model: Semigroup, horizon) -> "AlgebraElement":
        return cls(model, {}, 1.0 + 0j, horizon)

    @classmethod
    def delta(cls, model: Semigroup, s, horizon, value: complex = 1.0) -> "AlgebraElement":
        return cls.from_coefficients(model, {s: value}, horizon)

    # -- access --------------------------------------------------------------

    def coefficient(self, s) -> complex:
        self.model.validate(s)
        if self.model.norm(s) > self.horizon:
            raise HorizonError(f"{s!r} lies beyond horizon {self.horizon}")
        return self.coeffs.get(s, 0j)

    def support(self) -> list:
        return sorted(self.coeffs, key=self.model.sort_key)

    def is_pure(self) -> bool:
        return self.unit_scalar == 0

    # -- linear structure ----------------------------------------------------

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self.model.require_same(other.model)
        acc = dict(self.coeffs)
        for s in other.support():
            v = acc.get(s, 0j) + other.coeffs[s]
            if v == 0:
                acc.pop(s, None)
            else:
                acc[s] = v
        return AlgebraElement(
            self.model, acc, self.unit_scalar + other.unit_scalar, min(self.horizon, other.horizon)
        )

    def __neg__(self) -> "AlgebraElement":
        return self * (-1.0)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def __mul__(self, scalar) -> "AlgebraElement":
        scalar = complex(scalar)
        coeffs = {} if scalar == 0 else {s: v * scalar for s, v in self.coeffs.items()}
        return AlgebraElement(self.model, coeffs, self.unit_scalar * scalar, self.horizon)

    __rmul__ = __mul__

    def map_abs(self) -> "AlgebraElement":
        """Element with |coefficients| (and |unit scalar|)."""
        return AlgebraElement(
            self.model,
            {s: complex(abs(v)) for s, v in self.coeffs.items()},
            complex(abs(self.unit_scalar)),
            self.horizon,
        )

    # -- dense adapters (rank-one families) ----------------------------------

    def dense(self) -> np.ndarray:
        """Integer-indexed coefficient array of length floor(horizon)+1."""
        if not _is_rank_one(self.model):
            raise DomainError("dense representation requires NStar or ZPlus(1)")
        b = int(math.floor(self.horizon))
        arr = np.zeros(b + 1, dtype=np.complex128)
        for s, v in self.coeffs.items():
            arr[_index_of(self.model, s)] = v
        return arr

    @classmethod
    def from_dense(
        cls, model: Semigroup, arr: np.ndarray, horizon, unit_scalar: complex = 0j
    ) -> "AlgebraElement":
        start = 1 if isinstance(model, NStar) else 0
        coeffs = {}
        for i in np.nonzero(arr)[0]:
            if i >= start:
                coeffs[_element_of(model, int(i))] = complex(arr[i])
        return cls(model, coeffs, complex(unit_scalar), horizon)


def _canonical_key(a: AlgebraElement):
    sup = a.support()
    return (
        len(sup),
        [a.model.sort_key(s) for s in sup],
        [(a.coeffs[s].real, a.coeffs[s].imag) for s in sup],
        (a.unit_scalar.real, a.unit_scalar.imag),
    )


def convolve(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Convolution in the unitized algebra, exact inside the joint horizon.

    The operands are put in a canonical order first, so ``convolve(a, b)`` and
    ``convolve(b, a)`` run the identical floating-point computation and agree
    bit for bit.
    """
    a.model.require_same(b.model)
    if _canonical_key(a) > _canonical_key(b):
        a, b = b, a
    model = a.model
    horizon = min(a.horizon, b.horizon)
    bound = int(math.floor(horizon))

    if _is_rank_one(model) and len(a.coeffs) * len(b.coeffs) > _DENSE_CUTOFF:
        ad = a.dense()[: bound + 1]
        bd = b.dense()[: bound + 1]
        kern = kernels.dirichlet_convolve if isinstance(model, NStar) else kernels.cauchy_convolve
        cd = kern(ad, bd)
        if a.unit_scalar != 0:
            cd += a.unit_scalar * bd
        if b.unit_scalar != 0:
            cd += b.unit_scalar * ad
        return AlgebraElement.from_dense(model, cd, horizon, a.unit_scalar * b.unit_scalar)

    acc: dict = {}

    def bump(s, v):
        w = acc.get(s, 0j) + v
        if w == 0:
            acc.pop(s, None)
        else:
            acc[s] = w

    if a.unit_scalar != 0:
        for s in b.support():
            if model.norm(s) <= horizon:
                bump(s, a.unit_scalar * b.coeffs[s])
    if b.unit_scalar != 0:
        for s in a.support():
            if model.norm(s) <= horizon:
                bump(s, b.unit_scalar * a.coeffs[s])
    b_support = b.support()
    for s in a.support():
        av = a.coeffs[s]
        for t in b_support:
            try:
                st = model.compose(s, t)
            except OverflowError:
                continue
            if model.norm(st) <= horizon:
                bump(st, av * b.coeffs[t])
    return AlgebraElement(model, acc, a.unit_scalar * b.unit_scalar, horizon)


def norm_w(k: AlgebraElement, w: Weight) -> float:
    """Unitization norm |lambda| + sum |k(s)| w(s) over the support."""
    terms = [abs(k.coeffs[s]) * eval_weight(w, s) for s in k.support()]
    return abs(k.unit_scalar) + math.fsum(terms)


@dataclass
class NeumannResult:
    """Outcome of the geometric-series inversion of ``u + q``."""

    element: AlgebraElement  # K with (u + K) * (u + q) = u up to the residual
    q_norm: float
    terms: int
    tail_bound: float
    residual_norm: float


def neumann_resolve(
    q: AlgebraElement, w: Weight, tol: float, max_terms: int = 200
) -> NeumannResult:
    """Invert ``u + q`` by the alternating geometric series.

    Requires ``norm_w(q, w) < 1``; the number of terms is chosen so the
    geometric tail bound ``||q||^(M+1) / (1 - ||q||)`` drops below ``tol``.
    The measured residual ``||(u+K)*(u+q) - u||_w`` is reported alongside and
    is at most ``2 * tol`` up to round-off.
    """
    nq = norm_w(q, w)
    if nq >= 1.0:
        raise NeumannConvergenceError(nq)
    if nq == 0.0:
        zero = AlgebraElement.zero(q.model, q.horizon)
        return NeumannResult(zero, 0.0, 0, 0.0, 0.0)
    terms = None
    for m in range(1, max_terms + 1):
        if nq ** (m + 1) / (1.0 - nq) <= tol:
            terms = m
            break
    if terms is None:
        raise DomainError(
            f"tolerance {tol} needs more than {max_terms} Neumann terms at norm {nq:.6g}"
        )
    power = q
    series = -q
    sign = 1.0
    for _ in range(terms - 1):
        power = convolve(power, q)
        series = series + sign * power
        sign = -sign
    residual = series + q + convolve(series, q)
    return NeumannResult(
        element=series,
        q_norm=nq,
        terms=terms,
        tail_bound=nq ** (terms + 1) / (1.0 - nq),
        residual_norm=norm_w(residual, w),
    )


def neumann_apply_inverse(
    K: "AlgebraElement", g: "BoundedFunction", w: Weight, tol: float, max_iter: int = 200
) -> tuple["BoundedFunction", int, float]:
    """Solve (u + K) * f = g for f by the fixed-point iteration f <- g - K * f.

    Requires ``norm_w(K, w) < 1``.  The iterate count is chosen from the
    geometric tail bound ``||K||^(m+1) / (1 - ||K||) * sup|g w|``; the bound
    actually used is returned alongside.
    """
    nk = norm_w(K, w)
    if nk >= 1.0:
        raise NeumannConvergenceError(nk)
    gw_sup = sup_norm(pointwise_weighted_product(g, w))
    if nk == 0.0 or gw_sup == 0.0:
        return g, 0, 0.0
    steps = None
    for m in range(1, max_iter + 1):
        if nk ** (m + 1) / (1.0 - nk) * gw_sup <= tol:
            steps = m
            break
    if steps is None:
        raise DomainError(f"tolerance {tol} needs more than {max_iter} iterations at norm {nk:.6g}")
    f = g
    for _ in range(steps):
        kf = apply_unitized(K, f)
        f = BoundedFunction.from_values(g.model, g.values - kf.values, g.horizon)
    return f, steps, nk ** (steps + 1) / (1.0 - nk) * gw_sup


# ---------------------------------------------------------------------------
# bounded functions
# ---------------------------------------------------------------------------


@dataclass
class BoundedFunction:
    """Total complex function on the enumeration prefix {norm <= horizon}.

    ``values[i]`` is the value at the i-th element of
    ``model.elements_up_to(horizon)``; ``bound`` is the declared sup-norm.
    """

    model: Semigroup
    values: np.ndarray
    horizon: float
    bound: float
    _positions: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if not (np.all(np.isfinite(self.values.real)) and np.all(np.isfinite(self.values.imag))):
            raise DomainError("bounded function values must be finite")
        actual = float(np.max(np.abs(self.values))) if len(self.values) else 0.0
        if actual > self.bound * (1 + 1e-12):
            raise DomainError(f"values exceed the declared bound {self.bound} (max {actual})")

    @classmethod
    def from_values(cls, model: Semigroup, values, horizon, bound: float | None = None):
        values = np.asarray(values, dtype=np.complex128)
        if bound is None:
            bound = float(np.max(np.abs(values))) if len(values) else 0.0
        return cls(model, values, horizon, bound)

    @classmethod
    def from_callable(cls, model: Semigroup, fn: Callable, horizon):
        values = np.array([fn(s) for s in model.elements_up_to(horizon)], dtype=np.complex128)
        return cls.from_values(model, values, horizon)

    @classmethod
    def ones(cls, model: Semigroup, horizon):
        n = len(model.elements_up_to(horizon))
        return cls(model, np.ones(n, dtype=np.complex128), horizon, 1.0)

    def elements(self) -> list:
        return self.model.elements_up_to(self.horizon)

    def _position(self, s) -> int:
        model = self.model
        if isinstance(model, NStar):
            return s - 1
        if isinstance(model, ZPlus) and model.d == 1:
            return s[0]
        if self._positions is None:
            self._positions = {e: i for i, e in enumerate(self.elements())}
        return self._positions[s]

    def value(self, s) -> complex:
        self.model.validate(s)
        if self.model.norm(s) > self.horizon:
            raise HorizonError(f"{s!r} lies beyond horizon {self.horizon}")
        return complex(self.values[self._position(s)])

    def map_abs(self) -> "BoundedFunction":
        return BoundedFunction(self.model, np.abs(self.values), self.horizon, self.bound)

    # dense integer-indexed view for the rank-one kernel paths
    def _dense_indexed(self) -> np.ndarray:
        b = int(math.floor(self.horizon))
        if isinstance(self.model, NStar):
            out = np.zeros(b + 1, dtype=np.complex128)
            out[1 : len(self.values) + 1] = self.values
            return out
        return np.array(self.values[: b + 1], dtype=np.complex128)

    @classmethod
    def _from_dense_indexed(cls, model, arr, horizon):
        values = arr[1:] if isinstance(model, NStar) else arr
        return cls.from_values(model, values, horizon)


def apply_unitized(z: AlgebraElement, f: BoundedFunction) -> BoundedFunction:
    """Action of ``lambda u + k`` on a bounded function: ``lambda f + k * f``.

    Exact inside the joint horizon; the declared bound of the result is the
    computed sup.
    """
    z.model.require_same(f.model)
    model = z.model
    horizon = min(z.horizon, f.horizon)
    if _is_rank_one(model):
        b = int(math.floor(horizon))
        kd = z.dense()[: b + 1]
        fd = f._dense_indexed()[: b + 1]
        kern = kernels.dirichlet_convolve if isinstance(model, NStar) else kernels.cauchy_convolve
        out = kern(kd, fd)
        if z.unit_scalar != 0:
            out += z.unit_scalar * fd
        return BoundedFunction._from_dense_indexed(model, out, horizon)

    elements = model.elements_up_to(horizon)
    support = z.support()
    out = np.zeros(len(elements), dtype=np.complex128)
    for i, t in enumerate(elements):
        acc = z.unit_scalar * f.value(t)
        for s in support:
            r = model.try_divide(t, s)
            if r is not None:
                acc += z.coeffs[s] * f.value(r)
        out[i] = acc
    return BoundedFunction.from_values(model, out, horizon)


def pointwise_weighted_product(f: BoundedFunction, w: Weight) -> BoundedFunction:
    """The function s -> f(s) * w(s) on the same horizon."""
    if _is_rank_one(f.model):
        warr = weight_array(w, f.model, f.horizon)
        warr = warr[1:] if isinstance(f.model, NStar) else warr
        values = f.values * warr[: len(f.values)]
    else:
        values = f.values * np.array([eval_weight(w, s) for s in f.elements()])
    return BoundedFunction.from_values(f.model, values, f.horizon)


def sup_norm(f: BoundedFunction) -> float:
    return float(np.max(np.abs(f.values))) if len(f.values) else 0.0

"""Tauberian-condition certificates and end-to-end experiment runners.

The checks here decide whether the transform of a kernel stays away from a
target value (-1 for the unitized condition, 0 for the kernel form) over the
relevant spectrum region, and whether weighted functions decay at infinity
along the enumeration exhaustion.  Certificates are conservative: "certified"
is only reported when a grid minimum survives a rigorous Lipschitz budget and
truncation radius; everything else is a violation with witness or an
inconclusive-with-evidence outcome.

"Infinity" on a discrete semigroup is realized as the complements of
enumeration prefixes; limsup/liminf figures are estimated over the last 20%
of the horizon and reported as estimates, never certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .algebra import (
    AlgebraElement,
    BoundedFunction,
    apply_unitized,
    neumann_apply_inverse,
    neumann_resolve,
    norm_w,
    pointwise_weighted_product,
)
from .errors import DomainError
from .semigroups import ConstantOne, NStar, Weight, ZPlus, weight_array
from .transforms import (
    FinitelySupported,
    GeometricBound,
    TailDescriptor,
    spectral_radius_bound,
)

TENDS_TO_ZERO = "tends-to-0"
TENDS_TO_C = "tends-to-c"
NO_LIMIT = "no-limit"
INCONCLUSIVE = "inconclusive"

CERTIFIED = "certified"
VIOLATED = "violated"
INCONCLUSIVE_EVIDENCE = "inconclusive"

# fraction of the horizon used for limsup/liminf estimation
_EST_WINDOW = 0.8


# ---------------------------------------------------------------------------
# decay profiling
# ---------------------------------------------------------------------------


@dataclass
class DecayReport:
    levels: list
    sup_outside: list  # sup of |f w| beyond each level, within the horizon
    verdict: str
    limit_value: complex | None
    limsup_estimate: float
    liminf_estimate: float
    eps: float
    horizon: float

    def to_rows(self):
        return [(lv, sup) for lv, sup in zip(self.levels, self.sup_outside)]


def _norms_of(f: BoundedFunction) -> np.ndarray:
    model = f.model
    n = len(f.values)
    if isinstance(model, NStar):
        return np.arange(1, n + 1, dtype=np.float64)
    if isinstance(model, ZPlus) and model.d == 1:
        return np.arange(0, n, dtype=np.float64)
    return np.array([model.norm(e) for e in f.elements()], dtype=np.float64)


def profile_values(
    values: np.ndarray, norms: np.ndarray, levels, eps: float, horizon: float
) -> DecayReport:
    """Verdict machinery shared by the discrete and lattice exhaustions.

    ``values`` are the weighted samples, ``norms`` their exhaustion grading.
    Verdicts: ``tends-to-0`` when the final tail sup is below eps;
    ``tends-to-c`` when the values outside the final level fit in an eps-ball
    around some c; ``no-limit`` when the last-window oscillation exceeds
    2 eps; ``inconclusive`` otherwise.
    """
    levels = [float(x) for x in levels]
    if not levels:
        raise DomainError("at least one exhaustion level is required")
    if any(b >= c for b, c in zip(levels, levels[1:])):
        raise DomainError("levels must be strictly increasing")
    if levels[-1] > horizon:
        raise DomainError("levels must not exceed the horizon")

    mags = np.abs(values)
    sup_outside = []
    for lv in levels:
        mask = norms > lv
        sup_outside.append(float(np.max(mags[mask])) if mask.any() else 0.0)

    est_mask = norms > _EST_WINDOW * float(horizon)
    if est_mask.any():
        limsup_est = float(np.max(mags[est_mask]))
        liminf_est = float(np.min(mags[est_mask]))
    else:
        limsup_est = sup_outside[-1]
        liminf_est = 0.0

    verdict = INCONCLUSIVE
    limit_value: complex | None = None
    if sup_outside[-1] <= eps:
        verdict = TENDS_TO_ZERO
        limit_value = 0j
    else:
        vals = values[norms > levels[-1]]
        center = complex(
            (vals.real.max() + vals.real.min()) / 2.0,
            (vals.imag.max() + vals.imag.min()) / 2.0,
        )
        dev = float(np.max(np.abs(vals - center)))
        if dev <= eps:
            verdict = TENDS_TO_C
            limit_value = center
        elif limsup_est - liminf_est > 2.0 * eps:
            verdict = NO_LIMIT
    return DecayReport(
        levels, sup_outside, verdict, limit_value, limsup_est, liminf_est, eps, horizon
    )


def decay_profile(f: BoundedFunction, w: Weight, levels, eps: float) -> DecayReport:
    """Tail sups of |f w| outside each enumeration level, with a verdict."""
    fw = pointwise_weighted_product(f, w).values
    return profile_values(fw, _norms_of(f), levels, eps, f.horizon)


# ---------------------------------------------------------------------------
# avoid-value certificates
# ---------------------------------------------------------------------------


@dataclass
class GridSpec:
    kind: str  # "disk" or "half-plane-rect"
    step: float
    points: int
    radius: float = 0.0
    radius_possibly_smaller: bool = False  # root sequence still decreasing at n_max
    sigma_max: float = 0.0
    t_max: float = 0.0


@dataclass
class ConditionCertificate:
    """Outcome of an avoid-value check.

    ``certified`` means: on the searched region the distance of the series to
    the target provably stays positive (grid minimum minus Lipschitz-times-
    covering-radius minus truncation radius is positive).  For the half-plane
    check this covers the grid rectangle and, via ``far_margin``, all larger
    real parts; ``half_plane_global`` additionally records when a triangle
    inequality settles the entire closed right half-plane.
    """

    status: str
    target: complex
    min_modulus: float
    grid: GridSpec
    lipschitz_bound: float
    tail_radius: float
    margin: float
    witness: complex | None = None
    witness_value: complex | None = None
    far_margin: float | None = None
    half_plane_global: bool = False


def check_avoid_value_disk(
    k: AlgebraElement,
    w: Weight,
    target: complex,
    grid_step: float,
    tol: float = 1e-9,
    tail: TailDescriptor = FinitelySupported(),
    radius_terms: int = 1024,
) -> ConditionCertificate:
    """Certified grid search for ``sum k(n) z**n != target`` on the weight disk.

    The disk radius is the root-sequence bound from the weight; grid points
    are clamped to the closed disk, so the Lipschitz budget only needs the
    derivative norm at the radius itself.
    """
    if not (isinstance(k.model, ZPlus) and k.model.d == 1):
        raise DomainError("the disk check requires a ZPlus(1) element")
    if grid_step <= 0.0:
        raise DomainError("grid_step must be positive")
    target = complex(target)
    rb = spectral_radius_bound(w, radius_terms)
    r = rb.value

    coeffs = k.dense()
    coeffs[0] += k.unit_scalar
    tail_eval = tail.series_tail(k.horizon, r)
    lipschitz = math.fsum(
        n * abs(coeffs[n]) * r ** (n - 1) for n in range(1, len(coeffs)) if coeffs[n] != 0
    )
    lipschitz += tail.derivative_tail(k.horizon, r)

    m = int(math.ceil((r + grid_step) / grid_step))
    axis = grid_step * np.arange(-m, m + 1, dtype=np.float64)
    re, im = np.meshgrid(axis, axis, indexing="ij")
    pts = (re + 1j * im).ravel()
    pts = pts[np.abs(pts) <= r + grid_step]
    outside = np.abs(pts) > r
    if outside.any():
        pts[outside] *= r / np.abs(pts[outside])

    vals = kernels.polyval_many(coeffs, pts)
    dist = np.abs(vals - target)
    imin = int(np.argmin(dist))
    min_modulus = float(dist[imin])
    covering = grid_step * math.sqrt(2.0) / 2.0
    margin = min_modulus - lipschitz * covering - tail_eval

    grid = GridSpec(
        kind="disk",
        step=grid_step,
        points=len(pts),
        radius=r,
        radius_possibly_smaller=rb.still_decreasing,
    )
    if min_modulus + tail_eval <= tol:
        status = VIOLATED
    elif margin > 0.0:
        status = CERTIFIED
    else:
        status = INCONCLUSIVE_EVIDENCE
    return ConditionCertificate(
        status=status,
        target=target,
        min_modulus=min_modulus,
        grid=grid,
        lipschitz_bound=lipschitz,
        tail_radius=tail_eval,
        margin=margin,
        witness=complex(pts[imin]),
        witness_value=complex(vals[imin]),
    )


def check_avoid_value_dirichlet(
    k: AlgebraElement,
    rho: Weight,
    target: complex,
    sigma_max: float,
    t_max: float,
    grid_step: float,
    tol: float = 1e-9,
    tail: TailDescriptor = FinitelySupported(),
) -> ConditionCertificate:
    """Avoid-value check for a Dirichlet series on the right half-plane.

    Searches the rectangle [0, sigma_max] x [-t_max, t_max]; between grid
    points the derivative bound sum |k(n)| rho(n) log(n) controls the series,
    and beyond sigma_max the series is pinned near its leading coefficient.
    The rectangle's |t| range is part of the certificate (see ``grid``);
    ``half_plane_global`` marks the cases settled everywhere by the triangle
    inequality.
    """
    if not isinstance(k.model, NStar):
        raise DomainError("the half-plane check requires an NStar element")
    if sigma_max <= 0.0 or t_max <= 0.0:
        raise DomainError("sigma_max and t_max must be positive")
    if grid_step <= 0.0:
        raise DomainError("grid_step must be positive")
    target = complex(target)

    coefw = k.dense()
    if not isinstance(rho, ConstantOne):
        coefw = coefw * weight_array(rho, k.model, len(coefw) - 1)
    coefw[0] = 0
    if len(coefw) > 1:
        coefw[1] += k.unit_scalar
    else:
        raise DomainError("horizon too small for the half-plane check")

    ns = int(math.ceil(sigma_max / grid_step)) + 1
    nt = 2 * int(math.ceil(t_max / grid_step)) + 1
    sigmas = np.linspace(0.0, sigma_max, ns)
    ts = np.linspace(-t_max, t_max, nt)
    vals = kernels.dirichlet_grid(coefw, sigmas, ts)
    dist = np.abs(vals - target)
    si, ti = np.unravel_index(int(np.argmin(dist)), dist.shape)
    min_modulus = float(dist[si, ti])

    tail_eval = tail.series_tail(k.horizon)
    try:
        lipschitz_tail = tail.derivative_tail(k.horizon, 1.0)
    except DomainError:
        lipschitz_tail = None
    idx = np.nonzero(coefw)[0]
    idx = idx[idx >= 2]
    lipschitz = math.fsum(abs(coefw[n]) * math.log(n) for n in idx)

    leading = complex(coefw[1])
    rest_far = math.fsum(abs(coefw[n]) * float(n) ** (-sigma_max) for n in idx)
    far_margin = abs(leading - target) - rest_far - tail_eval
    rest_all = math.fsum(abs(coefw[n]) for n in idx)
    half_plane_global = abs(leading - target) - rest_all - tail_eval > 0.0

    h_sigma = sigma_max / (ns - 1)
    h_t = 2.0 * t_max / (nt - 1)
    covering = math.hypot(h_sigma, h_t) / 2.0
    if lipschitz_tail is None:
        margin = -math.inf
    else:
        margin = min_modulus - (lipschitz + lipschitz_tail) * covering - tail_eval

    grid = GridSpec(
        kind="half-plane-rect",
        step=grid_step,
        points=ns * nt,
        sigma_max=sigma_max,
        t_max=t_max,
    )
    if min_modulus + tail_eval <= tol:
        status = VIOLATED
    elif margin > 0.0 and far_margin > 0.0:
        status = CERTIFIED
    else:
        status = INCONCLUSIVE_EVIDENCE
    return ConditionCertificate(
        status=status,
        target=target,
        min_modulus=min_modulus,
        grid=grid,
        lipschitz_bound=lipschitz,
        tail_radius=tail_eval,
        margin=margin,
        witness=complex(sigmas[si], ts[ti]),
        witness_value=complex(vals[si, ti]),
        far_margin=far_margin,
        half_plane_global=half_plane_global,
    )


def _default_condition_check(K: AlgebraElement, w: Weight, target: complex, options: dict | None):
    options = dict(options or {})
    model = K.model
    if isinstance(model, ZPlus) and model.d == 1:
        options.setdefault("grid_step", 0.02)
        return check_avoid_value_disk(K, w, target, **options)
    if isinstance(model, NStar):
        options.setdefault("sigma_max", 10.0)
        options.setdefault("t_max", 50.0)
        options.setdefault("grid_step", 0.25)
        return check_avoid_value_dirichlet(K, w, target, **options)
    raise DomainError(f"no avoid-value check available on family {model.family!r}")


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

CONSISTENT = "pass"
VACUOUS = "vacuous"
FAILED = "FAIL"


@dataclass
class TauberianReport:
    """Condition certificate plus both decay profiles and the logic verdict.

    ``consistency`` is ``pass`` when the certified condition and the decay of
    the convolved side force (and find) decay of the original; ``vacuous``
    when the hypotheses are not all established; ``FAIL`` flags a bug, not a
    refutation.
    """

    certificate: ConditionCertificate
    decay_convolved: DecayReport
    decay_original: DecayReport
    consistency: str
    eps: float


def _consistency(cert: ConditionCertificate, d_conv: DecayReport, d_orig: DecayReport) -> str:
    if cert.status == CERTIFIED and d_conv.verdict == TENDS_TO_ZERO:
        return CONSISTENT if d_orig.verdict == TENDS_TO_ZERO else FAILED
    return VACUOUS


def tauberian_experiment(
    f: BoundedFunction,
    K: AlgebraElement,
    w: Weight,
    levels,
    eps: float,
    check_options: dict | None = None,
) -> TauberianReport:
    """Forward check of the unitized tauberian implication.

    Certifies the transform of K away from -1, profiles (f + K*f) w and f w,
    and reports whether the implication held on this data.
    """
    f.model.require_same(K.model)
    cert = _default_condition_check(K, w, -1.0 + 0j, check_options)
    unit = AlgebraElement.unit(K.model, K.horizon)
    g = apply_unitized(unit + K, f)
    d_conv = decay_profile(g, w, levels, eps)
    d_orig = decay_profile(f, w, levels, eps)
    return TauberianReport(cert, d_conv, d_orig, _consistency(cert, d_conv, d_orig), eps)


def kernel_tauberian_experiment(
    f: BoundedFunction,
    k: AlgebraElement,
    w: Weight,
    levels,
    eps: float,
    check_options: dict | None = None,
) -> TauberianReport:
    """Kernel form on a discrete unital semigroup: condition is transform != 0.

    Internally reduces to the unitized experiment with K = k - u, since
    (f * k) w = (f + (k - u) * f) w.
    """
    f.model.require_same(k.model)
    cert = _default_condition_check(k, w, 0j, check_options)
    g = apply_unitized(k, f)  # equals f + (k - u) * f
    d_conv = decay_profile(g, w, levels, eps)
    d_orig = decay_profile(f, w, levels, eps)
    return TauberianReport(cert, d_conv, d_orig, _consistency(cert, d_conv, d_orig), eps)


@dataclass
class AbelianReport:
    decay_input: DecayReport
    decay_convolved: DecayReport
    kernel_norm: float
    eps_scaled: float
    passed: bool


def abelian_experiment(
    f: BoundedFunction,
    k: AlgebraElement,
    w: Weight,
    levels,
    eps: float,
) -> AbelianReport:
    """Forward (abelian) direction: decay of f w forces decay of (f * k) w.

    Precondition: the profile of f w must come out tends-to-0; the convolved
    profile is then required at eps scaled by the kernel norm.
    """
    f.model.require_same(k.model)
    d_in = decay_profile(f, w, levels, eps)
    if d_in.verdict != TENDS_TO_ZERO:
        raise DomainError("abelian precondition failed: f w does not decay below eps")
    nk = norm_w(k, w)
    g = apply_unitized(k, f)
    eps_out = eps * nk if nk > 0 else eps
    d_out = decay_profile(g, w, levels, eps_out)
    return AbelianReport(d_in, d_out, nk, eps_out, d_out.verdict == TENDS_TO_ZERO)


# ---------------------------------------------------------------------------
# the dyadic no-limit counterexample
# ---------------------------------------------------------------------------


def dyadic_kernel(horizon) -> tuple[AlgebraElement, GeometricBound]:
    """Kernel q(n) = 2**-(n+1) on the multiplicative integers, with its tail.

    Coefficients below the double-precision underflow threshold are dropped;
    the geometric descriptor (ratio 1/2, scale 1/2) covers everything beyond
    the stored support.
    """
    model = NStar()
    b = int(horizon)
    coeffs = {}
    for n in range(1, b + 1):
        v = 2.0 ** (-(n + 1))
        if v == 0.0:
            break
        coeffs[n] = v
    q = AlgebraElement.from_coefficients(model, coeffs, b)
    return q, GeometricBound(0.5, 0.5)


@dataclass
class AssertionRecord:
    name: str
    passed: bool
    detail: str


@dataclass
class CounterexampleReport:
    assertions: list[AssertionRecord]
    decay: DecayReport
    neumann_residual: float
    inversion_sup: float
    f: BoundedFunction
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = all(a.passed for a in self.assertions)


def dyadic_counterexample(
    horizon: int = 5000,
    neumann_tol: float = 5e-11,
    primes_up_to: int = 31,
    levels=None,
    eps: float = 1e-3,
) -> CounterexampleReport:
    """No-limit counterexample for the nonzero-limit variant of the implication.

    Builds the dyadic kernel q, inverts u + q by the geometric series, sets
    f = 1 + 1 * q, and checks: the inversion residual; that f + f * K is the
    constant 1 up to the residual; the exact dyadic values of f at primes;
    the 11/8 lower bound at 840 (divisible by 1..8); and the no-limit decay
    verdict.
    """
    b = int(horizon)
    if b < 840:
        raise DomainError("horizon must be at least 840")
    model = NStar()
    q, _ = dyadic_kernel(b)
    res = neumann_resolve(q, ConstantOne(), neumann_tol)
    unit = AlgebraElement.unit(model, b)
    ones = BoundedFunction.ones(model, b)
    f = apply_unitized(unit + q, ones)
    h = apply_unitized(unit + res.element, f)
    inversion_sup = float(np.max(np.abs(h.values - 1.0)))

    if levels is None:
        levels = [b // 5, 2 * b // 5, 3 * b // 5, 4 * b // 5]
    decay = decay_profile(f, ConstantOne(), levels, eps)

    checks = []
    checks.append(
        AssertionRecord(
            "neumann-residual",
            res.residual_norm <= 2.0 * neumann_tol,
            f"residual {res.residual_norm:.3e} vs 2*tol {2 * neumann_tol:.3e}",
        )
    )
    checks.append(
        AssertionRecord(
            "inversion-sup",
            inversion_sup <= 10.0 * neumann_tol,
            f"sup |f + f*K - 1| = {inversion_sup:.3e} vs 10*tol {10 * neumann_tol:.3e}",
        )
    )
    f2 = f.value(2).real
    checks.append(AssertionRecord("value-at-2", f2 == 1.375, f"f(2) = {f2!r}"))
    worst = 0.0
    exact = True
    for p in model.primes_up_to(primes_up_to):
        expected = 1.25 + 2.0 ** (-(p + 1))
        got = f.value(p).real
        if got != expected:
            exact = False
            worst = max(worst, abs(got - expected))
    checks.append(
        AssertionRecord(
            "prime-values",
            exact,
            "exact dyadic match" if exact else f"max deviation {worst:.3e}",
        )
    )
    f840 = f.value(840).real
    checks.append(AssertionRecord("value-at-840", f840 >= 1.375, f"f(840) = {f840!r}"))
    checks.append(
        AssertionRecord("decay-no-limit", decay.verdict == NO_LIMIT, f"verdict {decay.verdict}")
    )
    checks.append(
        AssertionRecord(
            "limsup-estimate",
            decay.limsup_estimate >= 1.375 - 1e-3,
            f"limsup estimate {decay.limsup_estimate!r}",
        )
    )
    return CounterexampleReport(checks, decay, res.residual_norm, inversion_sup, f)


@dataclass
class RoundTripReport:
    assertions: list[AssertionRecord]
    certificate: ConditionCertificate
    decay_convolved: DecayReport
    decay_original: DecayReport
    recovery_sup_error: float
    iterations: int
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = all(a.passed for a in self.assertions)


def synthetic_roundtrip(
    horizon: int = 10_000,
    support_size: int = 25,
    max_index: int = 64,
    target_norm: float = 0.4,
    seed: int = 42,
    grid_step: float = 0.01,
    recover_tol: float = 1e-8,
    check_prefix: int = 8000,
    levels=None,
    eps: float = 1e-3,
) -> RoundTripReport:
    """Forward-then-inverse consistency run on the additive integers.

    Draws a random kernel K of prescribed small norm, certifies its transform
    away from -1 on the unit disk, convolves f(n) = 1/(n+1) forward to
    g = f + K * f, recovers f back from g by the geometric-series iteration,
    and checks the sup error on the requested prefix together with both decay
    verdicts.
    """
    b = int(horizon)
    if levels is None:
        levels = [1000, 2000, 4000, 8000]
    model = ZPlus(1)
    w = ConstantOne()
    rng = np.random.default_rng(seed)
    idx = rng.choice(np.arange(1, max_index + 1), size=support_size, replace=False)
    raw = rng.standard_normal(support_size) + 1j * rng.standard_normal(support_size)
    raw *= target_norm / np.sum(np.abs(raw))
    K = AlgebraElement.from_coefficients(
        model, {(int(i),): complex(v) for i, v in zip(idx, raw)}, b
    )

    cert = check_avoid_value_disk(K, w, -1.0 + 0j, grid_step)
    f = BoundedFunction.from_values(
        model, 1.0 / (np.arange(b + 1, dtype=np.float64) + 1.0), b
    )
    unit = AlgebraElement.unit(model, b)
    g = apply_unitized(unit + K, f)
    f_rec, iterations, _ = neumann_apply_inverse(K, g, w, recover_tol / 2.0)
    prefix = int(check_prefix) + 1
    sup_err = float(np.max(np.abs(f_rec.values[:prefix] - f.values[:prefix])))

    d_conv = decay_profile(g, w, levels, eps)
    d_orig = decay_profile(f, w, levels, eps)

    checks = [
        AssertionRecord("condition-certified", cert.status == CERTIFIED, f"status {cert.status}"),
        AssertionRecord(
            "recovery-sup",
            sup_err <= recover_tol,
            f"sup error {sup_err:.3e} on [0, {check_prefix}] vs {recover_tol:.1e}",
        ),
        AssertionRecord(
            "convolved-decay", d_conv.verdict == TENDS_TO_ZERO, f"verdict {d_conv.verdict}"
        ),
        AssertionRecord(
            "original-decay", d_orig.verdict == TENDS_TO_ZERO, f"verdict {d_orig.verdict}"
        ),
    ]
    return RoundTripReport(checks, cert, d_conv, d_orig, sup_err, iterations)


# ---------------------------------------------------------------------------
# averaging means
# ---------------------------------------------------------------------------


def mercer_mean(x, alpha: float) -> np.ndarray:
    """y_n = alpha x_n + (1 - alpha) * (x_1 + ... + x_n) / n."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie strictly between 0 and 1")
    return kernels.mercer_forward(np.asarray(x, dtype=np.float64), float(alpha))


def mercer_invert(y, alpha: float) -> np.ndarray:
    """Recover x from its averaged sequence; exact inverse of mercer_mean."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie strictly between 0 and 1")
    return kernels.mercer_invert(np.asarray(y, dtype=np.float64), float(alpha))

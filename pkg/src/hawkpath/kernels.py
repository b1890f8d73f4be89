"""Excitation kernels on [0, T]: evaluation, grid sampling, norms, regularity moduli.

A kernel weighs the influence of a past event at lag t - s on the current
event rate.  Everything downstream (stability ratios, regularity constants,
theory shapes) is driven by integrals of the kernel and of its shift /
grid-projection differences, so those integrals are computed here, with
closed forms wherever a family admits one and adaptive Simpson quadrature
otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DivergingKernelError, InfiniteVariationError, ParameterError

__all__ = [
    "Kernel",
    "GridCoefficients",
    "PVariationResult",
    "exponential_kernel",
    "erlang_kernel",
    "cosine_decay_kernel",
    "inverse_sqrt_kernel",
    "compact_kernel",
    "constant_kernel",
    "zero_kernel",
    "custom_kernel",
    "tabulated_kernel",
    "integrate",
    "l1_norm",
    "grid_coefficients",
    "shift_modulus",
    "grid_projection_modulus",
    "c_r",
    "p_variation",
]

_MACHINE_SLACK = 1.0 + 64.0 * np.finfo(float).eps


# --------------------------------------------------------------------------
# Quadrature
# --------------------------------------------------------------------------

def _adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int) -> float:
    """Classic adaptive Simpson on [a, b] to absolute tolerance tol."""
    fa = float(f(a))
    fb = float(f(b))
    m = 0.5 * (a + b)
    fm = float(f(m))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_step(f, a, fa, m, fm, b, fb, whole, tol, max_depth)


def _simpson_step(f, a, fa, m, fm, b, fb, whole, tol, depth) -> float:
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = float(f(lm))
    frm = float(f(rm))
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    err = left + right - whole
    if abs(err) <= 15.0 * tol:
        return left + right + err / 15.0
    if depth <= 0:
        raise DivergingKernelError(
            f"quadrature did not converge on [{a:g}, {b:g}] "
            f"(residual {abs(err):.3e}); kernel may have a non-integrable singularity"
        )
    return (
        _simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1)
        + _simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1)
    )


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    *,
    tol: float = 1e-9,
    breakpoints: tuple[float, ...] = (),
    max_depth: int = 50,
) -> float:
    """Integrate f over [a, b] by adaptive Simpson, subdividing at breakpoints.

    Declared non-smooth points inside (a, b) become panel boundaries so the
    adaptive rule only ever sees smooth integrands.
    """
    if b <= a:
        return 0.0
    cuts = sorted(p for p in breakpoints if a < p < b)
    edges = [a, *cuts, b]
    n_panels = len(edges) - 1
    return sum(
        _adaptive_simpson(f, lo, hi, tol / n_panels, max_depth)
        for lo, hi in zip(edges[:-1], edges[1:])
    )


# --------------------------------------------------------------------------
# Kernel type and families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Kernel:
    """An excitation kernel h on [0, T].

    ``evaluate`` must accept numpy arrays of lags in (0, T] and return arrays.
    Immutable after construction, so instances are safe to share across
    concurrent trials.

    Optional analytic metadata (validated against quadrature in the test
    suite to 1e-6 relative):

    - ``l1_closed_form``    -- integral of |h| over the full horizon,
    - ``sup_norm``          -- sup of |h| on (0, T]; None for unbounded families,
    - ``abs_antiderivative``-- H(x) = integral of |h| over [0, x],
    - ``monotone_breaks``   -- boundaries of monotone pieces, 0 and T included,
    - ``support``           -- S with h(t) = 0 for t >= S (compact families),
    - ``nonsmooth_points``  -- kinks / sign changes used to split quadrature panels.
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    horizon: float
    family: str
    l1_closed_form: float | None = None
    sup_norm: float | None = None
    abs_antiderivative: Callable[[float], float] | None = None
    monotone_breaks: tuple[float, ...] | None = None
    support: float | None = None
    nonsmooth_points: tuple[float, ...] = ()
    monotone_decreasing: bool = False
    singular_at_zero: bool = False

    def __post_init__(self) -> None:
        if self.horizon <= 0:
            raise ParameterError("kernel horizon must be positive")

    def __call__(self, t):
        return self.evaluate(t)


@dataclass(frozen=True)
class GridCoefficients:
    """Kernel samples h(k*delta), k = 1..count, never touching t = 0."""

    delta: float
    count: int
    values: np.ndarray

    @property
    def abs_l1(self) -> float:
        """Riemann-sum analogue of the L1 norm: sum |h_k| * delta."""
        return float(np.abs(self.values).sum() * self.delta)

    @property
    def abs_l2_sq(self) -> float:
        """Squared discrete L2 norm: sum h_k^2 * delta."""
        return float(np.square(self.values).sum() * self.delta)


def exponential_kernel(amplitude: float, decay: float, horizon: float) -> Kernel:
    """h(t) = amplitude * exp(-decay * t); monotone for amplitude > 0."""
    if decay <= 0:
        raise ParameterError("decay must be positive")
    a, b = float(amplitude), float(decay)

    def h(t):
        return a * np.exp(-b * np.asarray(t, dtype=float))

    def habs(x: float) -> float:
        return abs(a) / b * (1.0 - math.exp(-b * x))

    return Kernel(
        evaluate=h,
        horizon=float(horizon),
        family="exponential",
        l1_closed_form=habs(horizon),
        sup_norm=abs(a),
        abs_antiderivative=habs,
        monotone_breaks=(0.0, float(horizon)),
        monotone_decreasing=a >= 0,
    )


def _gamma_lower(k: int, b: float, x: float) -> float:
    # integral of t^k exp(-b t) over [0, x], by repeated integration by parts
    tail = sum((b * x) ** j / math.factorial(j) for j in range(k + 1))
    return math.factorial(k) / b ** (k + 1) * (1.0 - math.exp(-b * x) * tail)


def erlang_kernel(amplitude: float, shape: int, decay: float, horizon: float) -> Kernel:
    """h(t) = amplitude * t^shape * exp(-decay * t) with integer shape >= 1."""
    if shape < 1 or shape != int(shape):
        raise ParameterError("shape must be an integer >= 1")
    if decay <= 0:
        raise ParameterError("decay must be positive")
    a, k, b, T = float(amplitude), int(shape), float(decay), float(horizon)
    peak = min(k / b, T)

    def h(t):
        t = np.asarray(t, dtype=float)
        return a * t ** k * np.exp(-b * t)

    def habs(x: float) -> float:
        return abs(a) * _gamma_lower(k, b, x)

    return Kernel(
        evaluate=h,
        horizon=T,
        family="erlang",
        l1_closed_form=habs(T),
        sup_norm=abs(a) * peak ** k * math.exp(-b * peak),
        abs_antiderivative=habs,
        monotone_breaks=(0.0, peak, T) if peak < T else (0.0, T),
    )


def _local_extrema(fn, T: float, scan: int = 4096) -> tuple[float, ...]:
    """Interior extrema of fn on [0, T] by sign-change scan + bisection."""
    ts = np.linspace(0.0, T, scan)
    vals = fn(ts)
    d = np.diff(vals)
    sign = np.sign(d)
    roots: list[float] = []
    for i in range(len(sign) - 1):
        if sign[i] != 0 and sign[i + 1] != 0 and sign[i] != sign[i + 1]:
            lo, hi = ts[i], ts[i + 2]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                left = fn(np.array([mid - 1e-12, mid]))
                if (left[1] - left[0]) * sign[i] > 0:
                    lo = mid
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
    return tuple(roots)


def cosine_decay_kernel(amplitude: float = 0.6, horizon: float = 5.0) -> Kernel:
    """h(t) = amplitude * cos(t) / (1 + t^2); oscillating, bounded variation."""
    a, T = float(amplitude), float(horizon)

    def h(t):
        t = np.asarray(t, dtype=float)
        return a * np.cos(t) / (1.0 + t * t)

    # |h| has kinks at the zeros of cos; extremal points found numerically.
    zeros = tuple(
        z for z in (math.pi / 2 + k * math.pi for k in range(int(T / math.pi) + 1)) if z < T
    )
    extrema = _local_extrema(h, T)
    return Kernel(
        evaluate=h,
        horizon=T,
        family="cosine-decay",
        sup_norm=abs(a),
        monotone_breaks=(0.0, *extrema, T),
        nonsmooth_points=zeros,
    )


def inverse_sqrt_kernel(
    horizon: float,
    coefficient: float | None = None,
    *,
    lipschitz: float = 1.0,
    mean_modulation: float = 1.0,
    target_rho: float = 0.5,
) -> Kernel:
    """h(t) = C / sqrt(t) on (0, T]; unbounded at 0, never evaluated there.

    When ``coefficient`` is omitted it is sized so that the stability ratio
    L * ||h||_1 * E b(Y) equals ``target_rho`` (< 1) for the given Lipschitz
    constant and mean modulation.
    """
    T = float(horizon)
    if coefficient is None:
        if not 0 < target_rho < 1:
            raise ParameterError("target_rho must lie in (0, 1)")
        coefficient = target_rho / (lipschitz * 2.0 * math.sqrt(T) * mean_modulation)
    c = float(coefficient)
    if c <= 0:
        raise ParameterError("coefficient must be positive")

    def h(t):
        return c / np.sqrt(np.asarray(t, dtype=float))

    def habs(x: float) -> float:
        return 2.0 * c * math.sqrt(x)

    return Kernel(
        evaluate=h,
        horizon=T,
        family="inverse-sqrt",
        l1_closed_form=habs(T),
        sup_norm=None,
        abs_antiderivative=habs,
        monotone_decreasing=True,
        singular_at_zero=True,
    )


def compact_kernel(amplitude: float, support: float, horizon: float) -> Kernel:
    """Triangular h(t) = amplitude * max(1 - t/S, 0); vanishes beyond t = S."""
    a, S, T = float(amplitude), float(support), float(horizon)
    if S <= 0:
        raise ParameterError("support must be positive")

    def h(t):
        t = np.asarray(t, dtype=float)
        return a * np.clip(1.0 - t / S, 0.0, None)

    def habs(x: float) -> float:
        x = min(x, S)
        return abs(a) * (x - x * x / (2.0 * S))

    breaks = (0.0, S, T) if S < T else (0.0, T)
    return Kernel(
        evaluate=h,
        horizon=T,
        family="compact-support",
        l1_closed_form=habs(T),
        sup_norm=abs(a),
        abs_antiderivative=habs,
        monotone_breaks=breaks,
        support=S,
        nonsmooth_points=(S,) if S < T else (),
        monotone_decreasing=a >= 0,
    )


def constant_kernel(value: float, horizon: float) -> Kernel:
    """h identically equal to ``value``."""
    v, T = float(value), float(horizon)

    def h(t):
        return np.full_like(np.asarray(t, dtype=float), v)

    return Kernel(
        evaluate=h,
        horizon=T,
        family="custom",
        l1_closed_form=abs(v) * T,
        sup_norm=abs(v),
        abs_antiderivative=lambda x: abs(v) * x,
        monotone_breaks=(0.0, T),
        monotone_decreasing=v >= 0,
    )


def zero_kernel(horizon: float) -> Kernel:
    """h identically zero: the no-excitation (pure Poisson) case."""
    k = constant_kernel(0.0, horizon)
    return Kernel(
        evaluate=k.evaluate,
        horizon=k.horizon,
        family="custom",
        l1_closed_form=0.0,
        sup_norm=0.0,
        abs_antiderivative=lambda x: 0.0,
        monotone_breaks=(0.0, float(horizon)),
        support=0.0,
        monotone_decreasing=True,
    )


def custom_kernel(
    evaluate: Callable[[np.ndarray], np.ndarray],
    horizon: float,
    **metadata,
) -> Kernel:
    """Wrap an arbitrary array-aware callable; metadata fields are optional."""
    return Kernel(evaluate=evaluate, horizon=float(horizon), family="custom", **metadata)


def tabulated_kernel(points: list[tuple[float, float]] | np.ndarray, horizon: float) -> Kernel:
    """Kernel from tabulated (t, h(t)) pairs with linear interpolation."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise ParameterError("tabulated kernel needs at least two (t, h) pairs")
    ts, vs = arr[:, 0], arr[:, 1]
    if np.any(np.diff(ts) <= 0):
        raise ParameterError("tabulated abscissae must be strictly increasing")

    def h(t):
        return np.interp(np.asarray(t, dtype=float), ts, vs)

    # local extrema of the polyline are exactly the knots where slope changes sign
    slopes = np.diff(vs) / np.diff(ts)
    interior = [
        float(ts[i + 1])
        for i in range(len(slopes) - 1)
        if slopes[i] * slopes[i + 1] < 0
    ]
    return Kernel(
        evaluate=h,
        horizon=float(horizon),
        family="custom",
        sup_norm=float(np.abs(vs).max()),
        monotone_breaks=(0.0, *interior, float(horizon)),
        nonsmooth_points=tuple(float(t) for t in ts if 0.0 < t < horizon),
    )


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------

def _abs_integral(kernel: Kernel, a: float, b: float, tol: float = 1e-9) -> float:
    """Integral of |h| over [a, b] <= horizon, closed form when declared."""
    if b <= a:
        return 0.0
    H = kernel.abs_antiderivative
    if H is not None:
        return H(b) - H(a)
    if kernel.singular_at_zero and a <= 0.0:
        raise DivergingKernelError("singular kernel without a declared antiderivative")
    return integrate(
        lambda t: abs(float(kernel.evaluate(np.array([t]))[0])),
        a,
        b,
        tol=tol,
        breakpoints=kernel.nonsmooth_points,
    )


def l1_norm(kernel: Kernel, T: float | None = None, *, tol: float = 1e-9) -> float:
    """Integral of |h| over [0, T] (T defaults to the kernel horizon)."""
    if T is None:
        T = kernel.horizon
    if T > kernel.horizon * _MACHINE_SLACK:
        raise ParameterError("T exceeds the kernel horizon")
    if kernel.l1_closed_form is not None and T == kernel.horizon:
        return kernel.l1_closed_form
    return _abs_integral(kernel, 0.0, T, tol)


def grid_coefficients(
    kernel: Kernel, delta: float, count: int, *, averaged: bool = False
) -> GridCoefficients:
    """Sample h at k*delta for k = 1..count (t = 0 is never evaluated).

    ``averaged=True`` replaces the point samples by per-cell averages
    (integral of h over ((k-1)*delta, k*delta] divided by delta), an
    alternative coefficient choice that is smoother but costlier for general
    kernels; the default point sampling is what the rest of the package
    assumes.
    """
    if delta <= 0:
        raise ParameterError("delta must be positive")
    if count < 1:
        raise ParameterError("count must be >= 1")
    if count * delta > kernel.horizon * _MACHINE_SLACK:
        raise ParameterError("count * delta exceeds the kernel horizon")
    if not averaged:
        lags = delta * np.arange(1, count + 1)
        values = np.asarray(kernel.evaluate(lags), dtype=float)
    else:
        values = np.empty(count)
        for k in range(1, count + 1):
            lo, hi = (k - 1) * delta, k * delta
            if k == 1 and kernel.monotone_decreasing and kernel.abs_antiderivative:
                cell = kernel.abs_antiderivative(hi) - kernel.abs_antiderivative(lo)
            else:
                cell = integrate(
                    lambda t: float(kernel.evaluate(np.array([max(t, 1e-300)]))[0]),
                    lo,
                    hi,
                    breakpoints=kernel.nonsmooth_points,
                )
            values[k - 1] = cell / delta
    return GridCoefficients(delta=float(delta), count=int(count), values=values)


def _shift_integral(kernel: Kernel, eps: float, upper: float, tol: float) -> float:
    """Integral over [0, upper] of |h(y + eps) - h(y)| dy at one eps."""
    if eps == 0.0:
        return 0.0
    if kernel.monotone_decreasing:
        # decreasing h >= 0: |h(y+eps) - h(y)| telescopes to a difference of
        # two integrals of h itself, which survives the singular families
        H = kernel.abs_antiderivative
        if H is not None:
            return H(upper) - (H(upper + eps) - H(eps))
    breaks = set(kernel.nonsmooth_points)
    breaks.update(p - eps for p in kernel.nonsmooth_points)

    def g(y: float) -> float:
        pair = kernel.evaluate(np.array([y + eps, max(y, 1e-300)]))
        return abs(float(pair[0]) - float(pair[1]))

    return integrate(g, 0.0, upper, tol=tol, breakpoints=tuple(breaks))


def _shift_profile(
    kernel: Kernel, delta: float, T: float, grid: int, tol: float
) -> tuple[np.ndarray, np.ndarray]:
    eps = np.linspace(0.0, delta, grid)
    vals = np.array([_shift_integral(kernel, e, T - delta, tol) for e in eps])
    return eps, vals


def shift_modulus(
    kernel: Kernel,
    delta: float,
    T: float | None = None,
    *,
    grid: int = 33,
    tol: float = 1e-9,
) -> float:
    """sup over eps in [0, delta] of the L1 shift difference of h on [0, T - delta].

    The supremum is approximated on a ``grid``-point eps mesh including both
    endpoints, then refined locally around the maximizer.  Kernels declared
    monotone decreasing use the exact telescoping identity per eps, for which
    the maximizer is the right endpoint.
    """
    if T is None:
        T = kernel.horizon
    if not 0 < delta < T:
        raise ParameterError("need 0 < delta < T")
    eps, vals = _shift_profile(kernel, delta, T, grid, tol)
    k = int(np.argmax(vals))
    best = float(vals[k])
    lo = eps[max(k - 1, 0)]
    hi = eps[min(k + 1, grid - 1)]
    for _ in range(2):
        fine = np.linspace(lo, hi, 5)
        fvals = np.array([_shift_integral(kernel, e, T - delta, tol) for e in fine])
        j = int(np.argmax(fvals))
        best = max(best, float(fvals[j]))
        lo = fine[max(j - 1, 0)]
        hi = fine[min(j + 1, 4)]
    return best


def grid_projection_modulus(
    kernel: Kernel, delta: float, T: float | None = None, *, tol: float = 1e-9
) -> float:
    """Integral over [0, T - delta] of |h(y) - h((y)_grid + delta)| dy.

    (y)_grid is the projection of y onto the delta-grid from below, so each
    grid cell compares h against its value at the cell's right endpoint.
    """
    if T is None:
        T = kernel.horizon
    if not 0 < delta < T:
        raise ParameterError("need 0 < delta < T")
    upper = T - delta
    total = 0.0
    k = 1
    H = kernel.abs_antiderivative
    while (k - 1) * delta < upper - 1e-15:
        lo = (k - 1) * delta
        hi = min(k * delta, upper)
        target = float(kernel.evaluate(np.array([k * delta]))[0])
        if kernel.monotone_decreasing and H is not None:
            # h >= target on the whole cell: the absolute value drops
            total += (H(hi) - H(lo)) - (hi - lo) * target
        else:
            def g(y: float, c: float = target) -> float:
                return abs(float(kernel.evaluate(np.array([max(y, 1e-300)]))[0]) - c)

            total += integrate(
                g, lo, hi, tol=tol, breakpoints=kernel.nonsmooth_points
            )
        k += 1
    return total


def c_r(kernel: Kernel, delta: float, T: float | None = None, *, tol: float = 1e-9) -> float:
    """Kernel-regularity constant: head integral + shift modulus + grid projection.

    The three terms are the integral of |h| over [0, delta], the sup-shift
    L1 modulus, and the grid-projection L1 modulus, all on the same horizon.
    """
    if T is None:
        T = kernel.horizon
    if not 0 < delta < T:
        raise ParameterError("need 0 < delta < T")
    head = _abs_integral(kernel, 0.0, delta, tol)
    return (
        head
        + shift_modulus(kernel, delta, T, tol=tol)
        + grid_projection_modulus(kernel, delta, T, tol=tol)
    )


@dataclass(frozen=True)
class PVariationResult:
    """p-variation value; ``exact`` is False for certified lower bounds."""

    value: float
    exact: bool


def _pvar_partition_dp(values: np.ndarray, p: float) -> float:
    # sup over subsets of the sample points of (sum |increments|^p); the
    # obviously-correct O(n^2) recursion, vectorized over predecessors
    n = len(values)
    cum = np.zeros(n)
    for j in range(1, n):
        cum[j] = np.max(cum[:j] + np.abs(values[j] - values[:j]) ** p)
    return float(cum[-1]) ** (1.0 / p)


def p_variation(kernel: Kernel, p: float = 1.0, T: float | None = None) -> PVariationResult:
    """p-variation of h on [0, T].

    Exact for p = 1 when monotone-piece boundaries are declared (the supremum
    is attained on the extrema partition).  For p > 1 the extrema-partition
    value is returned and flagged as a certified lower bound.  Without
    declared boundaries, a dyadic-grid search at three refinement levels is
    used, also flagged as a lower bound.
    """
    if p < 1:
        raise ParameterError("p must be >= 1")
    if T is None:
        T = kernel.horizon
    if kernel.singular_at_zero or kernel.sup_norm is None:
        raise InfiniteVariationError(
            f"kernel family {kernel.family!r} is unbounded on (0, T]"
        )
    if kernel.monotone_breaks is not None:
        pts = np.array(sorted({min(b, T) for b in kernel.monotone_breaks} | {0.0, T}))
        vals = np.asarray(kernel.evaluate(np.maximum(pts, 1e-300)), dtype=float)
        if p == 1.0:
            return PVariationResult(float(np.abs(np.diff(vals)).sum()), exact=True)
        return PVariationResult(
            float((np.abs(np.diff(vals)) ** p).sum() ** (1.0 / p)), exact=False
        )
    best = 0.0
    for level in (8, 9, 10):
        ts = np.linspace(0.0, T, 2 ** level + 1)
        vals = np.asarray(kernel.evaluate(np.maximum(ts, 1e-300)), dtype=float)
        best = max(best, _pvar_partition_dp(vals, p))
    return PVariationResult(best, exact=False)

"""Coupled construction of the continuous-time and discrete-time risk processes.

Both processes are built by thinning the *same* materialized Poisson atoms:
the continuous process accepts an atom (tau, theta, y) when theta is below
the left-limit intensity at tau, the discrete scheme freezes its intensity
per time bin and accepts bin atoms under that frozen level.  A fast
compound-Poisson sampler reproduces the discrete marginals without atoms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bounds import rho_continuous, rho_discrete
from .errors import (
    InstabilityError,
    InstabilityWarning,
    ParameterError,
    RunawayIntensityError,
)
from .kernels import GridCoefficients, Kernel, grid_coefficients
from .randomness import MarkModel, PoissonAtoms, extend_ceiling, sample_atoms

__all__ = [
    "JumpRate",
    "ContinuousPath",
    "DiscreteTrace",
    "StepPath",
    "relu_affine",
    "clipped_affine",
    "sigmoid_rate",
    "constant_rate",
    "custom_rate",
    "simulate_continuous",
    "eval_intensity",
    "integrate_intensity",
    "simulate_discrete",
    "simulate_discrete_fast",
    "couple",
    "default_ceiling",
    "path_to_step",
    "make_step_path",
    "step_from_jumps",
]

_REL_TOL = 1e-9


# --------------------------------------------------------------------------
# Jump rate
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class JumpRate:
    """Nonnegative Lipschitz map from kernel-weighted past to event rate.

    ``sup_norm`` is None for unbounded families; ``at_zero`` is the rate of
    an empty past.
    """

    family: str
    fn: Callable[[np.ndarray], np.ndarray]
    lipschitz: float
    at_zero: float
    sup_norm: float | None = None

    def __call__(self, x):
        return self.fn(x)


def relu_affine(baseline: float) -> JumpRate:
    """psi(x) = max(baseline + x, 0); the standard unbounded family."""
    mu = float(baseline)

    def fn(x):
        return np.maximum(mu + np.asarray(x, dtype=float), 0.0)

    return JumpRate("relu-affine", fn, lipschitz=1.0, at_zero=max(mu, 0.0), sup_norm=None)


def clipped_affine(baseline: float, cap: float) -> JumpRate:
    """psi(x) = min(max(baseline + x, 0), cap); bounded by construction."""
    mu, c = float(baseline), float(cap)
    if c <= 0:
        raise ParameterError("cap must be positive")

    def fn(x):
        return np.clip(mu + np.asarray(x, dtype=float), 0.0, c)

    return JumpRate("clipped-affine", fn, lipschitz=1.0, at_zero=min(max(mu, 0.0), c), sup_norm=c)


def sigmoid_rate(scale: float) -> JumpRate:
    """psi(x) = scale / (1 + exp(-x)); bounded, Lipschitz constant scale / 4."""
    lam = float(scale)
    if lam <= 0:
        raise ParameterError("scale must be positive")

    def fn(x):
        return lam / (1.0 + np.exp(-np.asarray(x, dtype=float)))

    return JumpRate("sigmoid", fn, lipschitz=lam / 4.0, at_zero=lam / 2.0, sup_norm=lam)


def constant_rate(value: float) -> JumpRate:
    """psi identically equal to ``value``: the pure Poisson case."""
    c = float(value)
    if c < 0:
        raise ParameterError("rate must be nonnegative")

    def fn(x):
        return np.full_like(np.asarray(x, dtype=float), c)

    return JumpRate("constant", fn, lipschitz=0.0, at_zero=c, sup_norm=c)


def custom_rate(
    fn: Callable[[np.ndarray], np.ndarray],
    lipschitz: float,
    *,
    sup_norm: float | None = None,
) -> JumpRate:
    at_zero = float(np.asarray(fn(0.0)))
    return JumpRate("custom", fn, float(lipschitz), at_zero, sup_norm)


# --------------------------------------------------------------------------
# Path containers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ContinuousPath:
    """Accepted events of the continuous-time process, in time order.

    ``intensities[i]`` is the left-limit intensity at the accepting atom, so
    it always dominates that atom's theta.
    """

    horizon: float
    times: np.ndarray
    marks: np.ndarray
    weights: np.ndarray       # modulation b(y) per event
    intensities: np.ndarray

    @property
    def terminal_count(self) -> int:
        return len(self.times)

    @property
    def terminal_risk(self) -> float:
        return float(self.marks.sum())


@dataclass(frozen=True)
class DiscreteTrace:
    """Arrays of the discrete scheme on the grid 0, delta, ..., count*delta.

    Index n holds the bin ((n-1)*delta, n*delta]; index 0 is the initial
    state.  ``intensity[0] == intensity[1]`` equals the empty-past rate.
    ``risk`` is the cumulative mark sum at the grid points.  ``bin_times``
    is None when produced by the fast sampler (no atom times exist there).
    """

    delta: float
    count: int
    intensity: np.ndarray           # l_0 .. l_M
    mass: np.ndarray                # X_0 .. X_M (modulated per-bin mass)
    events: np.ndarray              # D_0 .. D_M (accepted counts)
    risk: np.ndarray                # R at 0, delta, ..., M*delta
    bin_marks: tuple[np.ndarray, ...]
    bin_times: tuple[np.ndarray, ...] | None = None

    @property
    def horizon(self) -> float:
        return self.delta * self.count

    @property
    def terminal_count(self) -> int:
        return int(self.events.sum())

    @property
    def terminal_risk(self) -> float:
        return float(self.risk[-1])


@dataclass(frozen=True)
class StepPath:
    """Right-continuous piecewise-constant path on [0, horizon].

    Canonical form: breakpoints strictly increasing starting at 0 and no two
    consecutive values equal, so equality of canonical paths is equality of
    the functions.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    horizon: float

    def __post_init__(self) -> None:
        if len(self.breakpoints) != len(self.values) or len(self.values) == 0:
            raise ParameterError("breakpoints and values must align and be nonempty")
        if self.breakpoints[0] != 0.0:
            raise ParameterError("a step path starts at 0")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ParameterError("breakpoints must be strictly increasing")
        if self.breakpoints[-1] > self.horizon:
            raise ParameterError("breakpoints must not exceed the horizon")

    @property
    def jump_count(self) -> int:
        return len(self.breakpoints) - 1

    def value_at(self, t):
        """Right-continuous evaluation, array-aware."""
        idx = np.searchsorted(self.breakpoints, np.asarray(t, dtype=float), side="right") - 1
        return self.values[np.maximum(idx, 0)]

    def equals(self, other: "StepPath") -> bool:
        return (
            self.horizon == other.horizon
            and len(self.values) == len(other.values)
            and bool(np.all(self.breakpoints == other.breakpoints))
            and bool(np.all(self.values == other.values))
        )


def make_step_path(breakpoints, values, horizon: float) -> StepPath:
    """Canonicalize (merge equal consecutive values) and wrap."""
    b = np.asarray(breakpoints, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(b) == 0 or b[0] != 0.0:
        b = np.concatenate(([0.0], b))
        v = np.concatenate(([v[0] if len(v) else 0.0], v))
    keep = np.ones(len(v), dtype=bool)
    keep[1:] = v[1:] != v[:-1]
    return StepPath(b[keep].copy(), v[keep].copy(), float(horizon))


def step_from_jumps(times, increments, horizon: float, initial: float = 0.0) -> StepPath:
    """Cumulative step path jumping by ``increments`` at ``times`` (sorted)."""
    t = np.asarray(times, dtype=float)
    inc = np.asarray(increments, dtype=float)
    if len(t) == 0:
        return StepPath(np.array([0.0]), np.array([float(initial)]), float(horizon))
    # collapse simultaneous jumps
    uniq, start = np.unique(t, return_index=True)
    sums = np.add.reduceat(inc, start)
    vals = float(initial) + np.cumsum(sums)
    return make_step_path(
        np.concatenate(([0.0], uniq)),
        np.concatenate(([float(initial)], vals)),
        horizon,
    )


# --------------------------------------------------------------------------
# Continuous-time thinning
# --------------------------------------------------------------------------

def _check_continuous_stability(kernel, jump_rate, mark_model, allow_unstable):
    rho = rho_continuous(kernel, jump_rate.lipschitz, mark_model)
    if rho >= 1.0 and not allow_unstable:
        raise InstabilityError(
            f"stability ratio {rho:.4g} >= 1; pass allow_unstable=True to override"
        )
    return rho


def simulate_continuous(
    kernel: Kernel,
    jump_rate: JumpRate,
    mark_model: MarkModel,
    T: float,
    atoms: PoissonAtoms,
    *,
    allow_unstable: bool = False,
    ceiling_cap_factor: float = 2.0**20,
) -> ContinuousPath:
    """Thin the atoms under the self-exciting intensity, in time order.

    Correctness requires the ceiling to dominate the intensity everywhere,
    not just at materialized atoms, so a running envelope

        psi(0) + L * ||h||_inf * (accepted modulated mass)

    is maintained and the ladder is doubled whenever the envelope outgrows
    it; past decisions stay valid because atoms in the new strips carry
    thetas above the old ceiling, which already dominated the intensity on
    the scanned region.  This limits exact continuous thinning to bounded
    kernels: no finite ceiling dominates the post-event spikes of a kernel
    that is singular at lag zero.  A per-atom exceedance check with rescan
    from the exceedance time remains as a backstop for kernels whose
    declared sup norm is wrong.
    """
    if T > atoms.horizon * (1 + _REL_TOL):
        raise ParameterError("T exceeds the atoms' horizon")
    if T > kernel.horizon * (1 + _REL_TOL):
        raise ParameterError("T exceeds the kernel horizon")
    if kernel.sup_norm is None or kernel.singular_at_zero:
        raise ParameterError(
            "continuous thinning requires a bounded kernel; only the discrete "
            "scheme supports kernels unbounded at lag zero"
        )
    _check_continuous_stability(kernel, jump_rate, mark_model, allow_unstable)

    cap = atoms.initial_ceiling * ceiling_cap_factor
    psi = jump_rate.fn
    support = kernel.support
    feedback = jump_rate.lipschitz * kernel.sup_norm

    def envelope(mass: float) -> float:
        env = jump_rate.at_zero + feedback * mass
        if jump_rate.sup_norm is not None:
            env = min(env, jump_rate.sup_norm)
        return env

    def raise_ceiling(target: float) -> None:
        new_ceiling = atoms.ceiling
        while new_ceiling < target:
            new_ceiling *= 2.0
            if new_ceiling > cap:
                raise RunawayIntensityError(
                    f"intensity envelope {target:.4g} needs a ceiling beyond "
                    f"the hard cap {cap:.4g}"
                )
            extend_ceiling(atoms, new_ceiling)

    accepted_mass = 0.0
    if atoms.ceiling < envelope(accepted_mass):
        raise_ceiling(envelope(accepted_mass))

    tau, theta, y, _ = atoms.merged()
    b = mark_model.modulate(y)
    n = len(tau)
    acc_t = np.empty(n)
    acc_y = np.empty(n)
    acc_b = np.empty(n)
    acc_lam = np.empty(n)
    cnt = 0
    i = 0

    def regrow(m: int) -> None:
        nonlocal acc_t, acc_y, acc_b, acc_lam
        grown = [np.empty(m) for _ in range(4)]
        for dst, src in zip(grown, (acc_t, acc_y, acc_b, acc_lam)):
            dst[:cnt] = src[:cnt]
        acc_t, acc_y, acc_b, acc_lam = grown

    while i < n:
        t_i = tau[i]
        if t_i > T * (1 + _REL_TOL):
            break
        j = cnt
        while j > 0 and acc_t[j - 1] >= t_i:
            j -= 1
        lo = 0
        if support is not None and j > 0:
            lo = int(np.searchsorted(acc_t[:j], t_i - support, side="right"))
        s = 0.0
        if j > lo:
            lags = t_i - acc_t[lo:j]
            s = float(np.dot(np.asarray(kernel.evaluate(lags), dtype=float), acc_b[lo:j]))
        lam = float(psi(s))
        if lam > atoms.ceiling:
            # backstop: the declared sup norm failed to bound the kernel
            raise_ceiling(lam)
            tau, theta, y, _ = atoms.merged()
            b = mark_model.modulate(y)
            n = len(tau)
            regrow(n)
            i = int(np.searchsorted(tau, t_i, side="left"))
            continue
        if theta[i] <= lam:
            acc_t[cnt] = t_i
            acc_y[cnt] = y[i]
            acc_b[cnt] = b[i]
            acc_lam[cnt] = lam
            cnt += 1
            accepted_mass += float(b[i])
            if envelope(accepted_mass) > atoms.ceiling:
                theta_i = theta[i]
                raise_ceiling(envelope(accepted_mass))
                tau, theta, y, _ = atoms.merged()
                b = mark_model.modulate(y)
                n = len(tau)
                regrow(n)
                # resume just past the atom that was accepted
                i = int(np.searchsorted(tau, t_i, side="left"))
                while i < n and tau[i] == t_i and theta[i] <= theta_i:
                    i += 1
                continue
        i += 1

    return ContinuousPath(
        horizon=float(T),
        times=acc_t[:cnt].copy(),
        marks=acc_y[:cnt].copy(),
        weights=acc_b[:cnt].copy(),
        intensities=acc_lam[:cnt].copy(),
    )


def eval_intensity(path: ContinuousPath, kernel: Kernel, jump_rate: JumpRate, t: float) -> float:
    """Left-limit intensity at t: events strictly before t contribute."""
    if not 0 <= t <= path.horizon * (1 + _REL_TOL):
        raise ParameterError("t must lie in [0, T]")
    j = int(np.searchsorted(path.times, t, side="left"))
    lo = 0
    if kernel.support is not None and j > 0:
        lo = int(np.searchsorted(path.times[:j], t - kernel.support, side="right"))
    s = 0.0
    if j > lo:
        lags = t - path.times[lo:j]
        s = float(np.dot(np.asarray(kernel.evaluate(lags), dtype=float), path.weights[lo:j]))
    return float(jump_rate.fn(s))


def integrate_intensity(
    path: ContinuousPath,
    kernel: Kernel,
    jump_rate: JumpRate,
    T: float | None = None,
    *,
    order: int = 16,
) -> float:
    """Integral of the intensity over [0, T] by per-segment Gauss-Legendre.

    The intensity is smooth between events for smooth kernels, so a fixed
    rule per inter-event segment is accurate; singular kernel families are
    not supported here.
    """
    if T is None:
        T = path.horizon
    edges = np.unique(np.concatenate(([0.0], path.times[path.times < T], [T])))
    nodes, weights = np.polynomial.legendre.leggauss(order)
    widths = np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    ts = (mids[:, None] + 0.5 * widths[:, None] * nodes[None, :]).ravel()
    if len(path.times):
        lags = ts[:, None] - path.times[None, :]
        mask = lags > 0
        vals = np.zeros_like(lags)
        safe = np.where(mask, lags, 1.0)
        vals[mask] = np.asarray(kernel.evaluate(safe), dtype=float)[mask]
        s = vals @ path.weights
    else:
        s = np.zeros_like(ts)
    lam = np.asarray(jump_rate.fn(s), dtype=float).reshape(len(widths), order)
    return float(((lam @ weights) * 0.5 * widths).sum())


# --------------------------------------------------------------------------
# Discrete scheme
# --------------------------------------------------------------------------

def _discrete_recursion_span(coeffs: np.ndarray) -> int:
    """Number of trailing bins that can contribute: index of last nonzero lag."""
    nz = np.nonzero(coeffs)[0]
    return int(nz[-1]) + 1 if len(nz) else 0


def _check_discrete_stability(coeffs, delta, jump_rate, mark_model, allow_unstable):
    grid = GridCoefficients(delta=float(delta), count=len(coeffs), values=coeffs)
    rho = rho_discrete(grid, jump_rate.lipschitz, mark_model)
    if rho >= 1.0 and not allow_unstable:
        warnings.warn(
            f"discrete stability ratio {rho:.4g} >= 1; a smaller step restores it "
            "for regular kernels",
            InstabilityWarning,
            stacklevel=3,
        )
    return rho


def simulate_discrete(
    kernel: Kernel,
    jump_rate: JumpRate,
    mark_model: MarkModel,
    delta: float,
    count: int,
    atoms: PoissonAtoms,
    *,
    allow_unstable: bool = False,
    ceiling_cap_factor: float = 2.0**20,
) -> DiscreteTrace:
    """Euler-type scheme: per-bin thinning under the frozen bin intensity.

    Bins are right-closed, ((n-1)*delta, n*delta].  The convolution driving
    the next intensity is truncated to the trailing nonzero kernel lags, so
    compact-support kernels cost O(r * M) instead of O(M^2).  An unstable
    step ratio warns rather than fails; allow_unstable acknowledges it and
    silences the warning.
    """
    M = int(count)
    T = delta * M
    if T > atoms.horizon * (1 + _REL_TOL):
        raise ParameterError("count * delta exceeds the atoms' horizon")
    coeffs = grid_coefficients(kernel, delta, M).values
    _check_discrete_stability(coeffs, delta, jump_rate, mark_model, allow_unstable)

    cap = atoms.initial_ceiling * ceiling_cap_factor
    psi = jump_rate.fn
    span = _discrete_recursion_span(coeffs)

    tau, theta, y, _ = atoms.merged()
    b = mark_model.modulate(y)

    intensity = np.empty(M + 1)
    mass = np.zeros(M + 1)
    events = np.zeros(M + 1, dtype=np.int64)
    risk = np.zeros(M + 1)
    bin_marks: list[np.ndarray] = [np.empty(0)] * (M + 1)
    bin_times: list[np.ndarray] = [np.empty(0)] * (M + 1)

    intensity[0] = jump_rate.at_zero
    for n in range(1, M + 1):
        if n == 1:
            l_n = jump_rate.at_zero
        else:
            k0 = max(1, n - span)
            width = n - k0
            s = float(np.dot(coeffs[:width], mass[k0:n][::-1])) if width > 0 else 0.0
            l_n = float(psi(s))
        while l_n > atoms.ceiling:
            new_ceiling = atoms.ceiling * 2.0
            if new_ceiling > cap:
                raise RunawayIntensityError(
                    f"bin intensity {l_n:.4g} needs a ceiling beyond the hard cap {cap:.4g}"
                )
            extend_ceiling(atoms, new_ceiling)
            tau, theta, y, _ = atoms.merged()
            b = mark_model.modulate(y)
        intensity[n] = l_n
        lo = int(np.searchsorted(tau, (n - 1) * delta, side="right"))
        hi = int(np.searchsorted(tau, n * delta, side="right"))
        sel = theta[lo:hi] <= l_n
        mass[n] = float(b[lo:hi][sel].sum())
        events[n] = int(sel.sum())
        risk[n] = risk[n - 1] + float(y[lo:hi][sel].sum())
        bin_marks[n] = y[lo:hi][sel].copy()
        bin_times[n] = tau[lo:hi][sel].copy()

    return DiscreteTrace(
        delta=float(delta),
        count=M,
        intensity=intensity,
        mass=mass,
        events=events,
        risk=risk,
        bin_marks=tuple(bin_marks),
        bin_times=tuple(bin_times),
    )


def simulate_discrete_fast(
    kernel: Kernel,
    jump_rate: JumpRate,
    mark_model: MarkModel,
    delta: float,
    count: int,
    seed: int | tuple[int, ...],
    *,
    poisson_cap: float = 1e9,
) -> DiscreteTrace:
    """Sample the discrete scheme directly: each bin is compound Poisson.

    Marginally equal in law to the atom-based scheme, with no pathwise
    coupling to the continuous process.
    """
    M = int(count)
    coeffs = grid_coefficients(kernel, delta, M).values
    _check_discrete_stability(coeffs, delta, jump_rate, mark_model, False)
    span = _discrete_recursion_span(coeffs)
    psi = jump_rate.fn

    entropy = (seed,) if isinstance(seed, int) else tuple(seed)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=entropy))

    intensity = np.empty(M + 1)
    mass = np.zeros(M + 1)
    events = np.zeros(M + 1, dtype=np.int64)
    risk = np.zeros(M + 1)
    bin_marks: list[np.ndarray] = [np.empty(0)] * (M + 1)

    intensity[0] = jump_rate.at_zero
    for n in range(1, M + 1):
        if n == 1:
            l_n = jump_rate.at_zero
        else:
            k0 = max(1, n - span)
            width = n - k0
            s = float(np.dot(coeffs[:width], mass[k0:n][::-1])) if width > 0 else 0.0
            l_n = float(psi(s))
        lam_bin = delta * l_n
        if lam_bin > poisson_cap:
            raise RunawayIntensityError(
                f"bin Poisson parameter {lam_bin:.4g} exceeds the sampler cap"
            )
        intensity[n] = l_n
        d = int(rng.poisson(lam_bin))
        marks = mark_model.sample(rng, d)
        events[n] = d
        mass[n] = float(mark_model.modulate(marks).sum())
        risk[n] = risk[n - 1] + float(marks.sum())
        bin_marks[n] = marks

    return DiscreteTrace(
        delta=float(delta),
        count=M,
        intensity=intensity,
        mass=mass,
        events=events,
        risk=risk,
        bin_marks=tuple(bin_marks),
        bin_times=None,
    )


# --------------------------------------------------------------------------
# Coupling
# --------------------------------------------------------------------------

def default_ceiling(jump_rate: JumpRate, kernel: Kernel, mark_model: MarkModel) -> float:
    """Four times the stationary mean-intensity bound, floored at 1.

    Keeps the expected number of ladder extensions O(1) per trial; the
    ladder doubles on exhaustion anyway.  A bounded jump rate caps the
    ceiling at its sup, which then dominates the intensity outright.
    """
    rho = rho_continuous(kernel, jump_rate.lipschitz, mark_model)
    base = jump_rate.at_zero
    if base <= 0.0:
        return 1.0
    ceiling = 4.0 * base / (1.0 - rho) if rho < 1.0 else 8.0 * base
    if jump_rate.sup_norm is not None:
        ceiling = min(ceiling, jump_rate.sup_norm)
    return ceiling


def couple(
    kernel: Kernel,
    jump_rate: JumpRate,
    mark_model: MarkModel,
    T: float,
    delta: float,
    seed: int | tuple[int, ...] | None = None,
    *,
    atoms: PoissonAtoms | None = None,
    initial_ceiling: float | None = None,
    allow_unstable: bool = False,
) -> tuple[ContinuousPath, DiscreteTrace]:
    """Run both simulators on one shared atom ladder.

    Ceiling extensions triggered by either process land in the shared ladder
    and are visible to the other; because every extension doubles the top,
    the k-th strip's contents depend only on the seed and k, so the result
    does not depend on which process triggered which extension.
    """
    M = round(T / delta)
    if M < 1 or abs(M * delta - T) > _REL_TOL * max(T, 1.0):
        raise ParameterError("T must be an integer multiple of delta")
    if atoms is None:
        if seed is None:
            raise ParameterError("either atoms or seed must be given")
        if initial_ceiling is None:
            initial_ceiling = default_ceiling(jump_rate, kernel, mark_model)
        atoms = sample_atoms(T, initial_ceiling, mark_model, seed)
    cont = simulate_continuous(
        kernel, jump_rate, mark_model, T, atoms, allow_unstable=allow_unstable
    )
    disc = simulate_discrete(
        kernel, jump_rate, mark_model, delta, M, atoms, allow_unstable=allow_unstable
    )
    return cont, disc


# --------------------------------------------------------------------------
# Step-path embedding
# --------------------------------------------------------------------------

_CONTINUOUS_FIELDS = ("count", "mass", "risk")
_DISCRETE_FIELDS = ("count", "mass", "risk", "intensity")


def path_to_step(path: ContinuousPath | DiscreteTrace, field: str) -> StepPath:
    """Embed a simulated process as a canonical step path.

    Continuous paths jump at their event times; discrete traces change value
    only at grid points (the bin content becomes visible at the bin's right
    endpoint).
    """
    if isinstance(path, ContinuousPath):
        if field not in _CONTINUOUS_FIELDS:
            raise ParameterError(f"field must be one of {_CONTINUOUS_FIELDS}")
        inc = {
            "count": np.ones_like(path.times),
            "mass": path.weights,
            "risk": path.marks,
        }[field]
        return step_from_jumps(path.times, inc, path.horizon)
    if isinstance(path, DiscreteTrace):
        if field not in _DISCRETE_FIELDS:
            raise ParameterError(f"field must be one of {_DISCRETE_FIELDS}")
        grid = path.delta * np.arange(path.count + 1)
        if field == "intensity":
            return make_step_path(grid, path.intensity, path.horizon)
        series = {
            "count": np.cumsum(path.events),
            "mass": np.cumsum(path.mass),
            "risk": path.risk,
        }[field]
        return make_step_path(grid, np.asarray(series, dtype=float), path.horizon)
    raise ParameterError("path must be a ContinuousPath or DiscreteTrace")

"""Shared Poisson randomness and mark distributions.

The dominating measure on [0, T] x (0, ceiling] x R is materialized as a
ladder of horizontal strips so that a trial can raise its theta-ceiling
lazily without ever touching the atoms already drawn: both the continuous
and the discrete process then read the *same* concrete atoms, which is what
makes their pathwise distance meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ParameterError, UnsupportedMomentError

__all__ = [
    "MarkModel",
    "MarkMoments",
    "PoissonAtoms",
    "Strip",
    "sample_atoms",
    "extend_ceiling",
    "mark_moments",
]

_DISTRIBUTIONS = ("point-mass", "exponential", "lognormal", "gaussian", "custom")
_MODULATIONS = ("constant-one", "indicator", "absolute-value", "custom")


def _phi(x: float) -> float:
    """Standard normal CDF."""
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


@dataclass(frozen=True)
class MarkModel:
    """Mark distribution nu plus the positive modulation b feeding the intensity.

    ``dist_params``: point-mass -> (value,); exponential -> (rate,);
    lognormal / gaussian -> (m, s).  ``mod_params``: indicator -> (threshold,).
    Custom distributions supply ``sampler(rng, size)``; custom modulations
    supply ``modulation_fn`` (positive, array-aware).  A custom distribution
    that is declared heavy-tailed (``finite_second_moment=False``) refuses
    second-moment requests.
    """

    distribution: str = "point-mass"
    dist_params: tuple[float, ...] = (1.0,)
    modulation: str = "constant-one"
    mod_params: tuple[float, ...] = ()
    sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None
    modulation_fn: Callable[[np.ndarray], np.ndarray] | None = None
    finite_second_moment: bool = True
    mc_samples: int = 10**6

    def __post_init__(self) -> None:
        if self.distribution not in _DISTRIBUTIONS:
            raise ParameterError(f"unknown distribution {self.distribution!r}")
        if self.modulation not in _MODULATIONS:
            raise ParameterError(f"unknown modulation {self.modulation!r}")
        if self.distribution == "custom" and self.sampler is None:
            raise ParameterError("custom distribution requires a sampler")
        if self.modulation == "custom" and self.modulation_fn is None:
            raise ParameterError("custom modulation requires modulation_fn")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.distribution == "point-mass":
            return np.full(size, self.dist_params[0], dtype=float)
        if self.distribution == "exponential":
            return rng.exponential(1.0 / self.dist_params[0], size)
        if self.distribution == "lognormal":
            m, s = self.dist_params
            return rng.lognormal(m, s, size)
        if self.distribution == "gaussian":
            m, s = self.dist_params
            return rng.normal(m, s, size)
        return np.asarray(self.sampler(rng, size), dtype=float)

    def modulate(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.modulation == "constant-one":
            return np.ones_like(y)
        if self.modulation == "indicator":
            return (y >= self.mod_params[0]).astype(float)
        if self.modulation == "absolute-value":
            return np.abs(y)
        return np.asarray(self.modulation_fn(y), dtype=float)


@dataclass(frozen=True)
class MarkMoments:
    """First/second moments of Y and b(Y); None where not declared finite."""

    mean: float            # E Y
    abs_mean: float        # E |Y|
    second: float | None   # E Y^2
    mod_mean: float        # E b(Y)
    mod_second: float | None  # E b(Y)^2
    mc_samples: int = 0
    mc_standard_error: float = 0.0


def _closed_form_dist_moments(model: MarkModel) -> tuple[float, float, float]:
    """(E Y, E|Y|, E Y^2) for the built-in distributions."""
    if model.distribution == "point-mass":
        c = model.dist_params[0]
        return c, abs(c), c * c
    if model.distribution == "exponential":
        rate = model.dist_params[0]
        return 1.0 / rate, 1.0 / rate, 2.0 / rate**2
    if model.distribution == "lognormal":
        m, s = model.dist_params
        mean = math.exp(m + s * s / 2.0)
        return mean, mean, math.exp(2.0 * m + 2.0 * s * s)
    m, s = model.dist_params  # gaussian
    folded = s * math.sqrt(2.0 / math.pi) * math.exp(-m * m / (2 * s * s)) + m * (
        1.0 - 2.0 * _phi(-m / s)
    ) if s > 0 else abs(m)
    return m, folded, m * m + s * s


def _tail_probability(model: MarkModel, a: float) -> float:
    """P(Y >= a) for the built-in distributions."""
    if model.distribution == "point-mass":
        return 1.0 if model.dist_params[0] >= a else 0.0
    if model.distribution == "exponential":
        return 1.0 if a <= 0 else math.exp(-model.dist_params[0] * a)
    if model.distribution == "lognormal":
        if a <= 0:
            return 1.0
        m, s = model.dist_params
        return 1.0 - _phi((math.log(a) - m) / s)
    m, s = model.dist_params  # gaussian
    return 1.0 - _phi((a - m) / s)


def mark_moments(model: MarkModel, *, seed: int = 0) -> MarkMoments:
    """Closed-form moments for built-ins; Monte Carlo fallback otherwise.

    The fallback draws ``model.mc_samples`` marks from a stream keyed by
    ``seed`` and records the worst per-moment standard error.
    """
    needs_mc = model.distribution == "custom" or model.modulation == "custom"
    if not needs_mc:
        mean, abs_mean, second = _closed_form_dist_moments(model)
        if model.modulation == "constant-one":
            mm, ms = 1.0, 1.0
        elif model.modulation == "indicator":
            mm = _tail_probability(model, model.mod_params[0])
            ms = mm
        else:  # absolute-value
            mm, ms = abs_mean, second
        return MarkMoments(mean, abs_mean, second, mm, ms)

    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(97,)))
    y = model.sample(rng, model.mc_samples)
    b = model.modulate(y)
    n = len(y)
    second = None
    mod_second = None
    se = 0.0
    if model.finite_second_moment:
        second = float(np.mean(y * y))
        mod_second = float(np.mean(b * b))
        se = max(
            float(np.std(y * y, ddof=1)),
            float(np.std(b * b, ddof=1)),
        ) / math.sqrt(n)
    se = max(
        se,
        float(np.std(np.abs(y), ddof=1)) / math.sqrt(n),
        float(np.std(b, ddof=1)) / math.sqrt(n),
    )
    return MarkMoments(
        mean=float(np.mean(y)),
        abs_mean=float(np.mean(np.abs(y))),
        second=second,
        mod_mean=float(np.mean(b)),
        mod_second=mod_second,
        mc_samples=n,
        mc_standard_error=se,
    )


def require_second_moment(moments: MarkMoments) -> tuple[float, float]:
    """(E Y^2, E b(Y)^2), raising when the declaration does not allow them."""
    if moments.second is None or moments.mod_second is None:
        raise UnsupportedMomentError(
            "second moment requested for a distribution not declared square-integrable"
        )
    return moments.second, moments.mod_second


# --------------------------------------------------------------------------
# Poisson atoms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Strip:
    """Atoms of the dominating measure with theta in (theta_low, theta_high]."""

    theta_low: float
    theta_high: float
    tau: np.ndarray
    theta: np.ndarray
    y: np.ndarray


@dataclass
class PoissonAtoms:
    """Materialized dominating Poisson measure, extensible upward in theta.

    Strips partition (0, ceiling].  Extending the ceiling appends a strip
    drawn from a stream keyed by (seed entropy, strip index) and never
    mutates existing strips, so every decision taken below the old ceiling
    is preserved.  One instance belongs to one trial (single writer).
    """

    horizon: float
    mark_model: MarkModel
    seed_entropy: tuple[int, ...]
    strips: list[Strip] = field(default_factory=list)
    strip_counter: int = 0
    _merged: tuple[np.ndarray, ...] | None = field(default=None, repr=False)

    @property
    def ceiling(self) -> float:
        return self.strips[-1].theta_high if self.strips else 0.0

    @property
    def initial_ceiling(self) -> float:
        return self.strips[0].theta_high if self.strips else 0.0

    def merged(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(tau, theta, y, strip index) over all strips, sorted by (tau, theta)."""
        if self._merged is None:
            tau = np.concatenate([s.tau for s in self.strips]) if self.strips else np.empty(0)
            theta = np.concatenate([s.theta for s in self.strips]) if self.strips else np.empty(0)
            y = np.concatenate([s.y for s in self.strips]) if self.strips else np.empty(0)
            sid = (
                np.concatenate(
                    [np.full(len(s.tau), i) for i, s in enumerate(self.strips)]
                )
                if self.strips
                else np.empty(0, dtype=int)
            )
            order = np.lexsort((theta, tau))
            self._merged = (tau[order], theta[order], y[order], sid[order])
        return self._merged


def _draw_strip(
    horizon: float,
    theta_low: float,
    theta_high: float,
    mark_model: MarkModel,
    entropy: tuple[int, ...],
    strip_index: int,
) -> Strip:
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=entropy, spawn_key=(strip_index,))
    )
    count = int(rng.poisson(horizon * (theta_high - theta_low)))
    # (1 - U) maps [0, 1) onto half-open-from-below intervals
    tau = horizon * (1.0 - rng.random(count))
    theta = theta_low + (theta_high - theta_low) * (1.0 - rng.random(count))
    y = mark_model.sample(rng, count)
    order = np.lexsort((theta, tau))
    return Strip(theta_low, theta_high, tau[order], theta[order], y[order])


def sample_atoms(
    T: float,
    ceiling: float,
    mark_model: MarkModel,
    seed: int | tuple[int, ...],
) -> PoissonAtoms:
    """Draw the base strip (0, ceiling] of the dominating measure.

    The output is a pure function of (T, ceiling, seed, mark model): the draw
    order (count, times, thetas, marks) is fixed.
    """
    if T <= 0:
        raise ParameterError("T must be positive")
    if ceiling <= 0:
        raise ParameterError("ceiling must be positive")
    entropy = (seed,) if isinstance(seed, int) else tuple(seed)
    atoms = PoissonAtoms(horizon=float(T), mark_model=mark_model, seed_entropy=entropy)
    atoms.strips.append(_draw_strip(T, 0.0, float(ceiling), mark_model, entropy, 0))
    atoms.strip_counter = 1
    return atoms


def extend_ceiling(atoms: PoissonAtoms, new_ceiling: float) -> PoissonAtoms:
    """Append the strip (old ceiling, new_ceiling]; existing strips untouched."""
    if new_ceiling <= atoms.ceiling:
        raise ParameterError("new ceiling must exceed the current ceiling")
    strip = _draw_strip(
        atoms.horizon,
        atoms.ceiling,
        float(new_ceiling),
        atoms.mark_model,
        atoms.seed_entropy,
        atoms.strip_counter,
    )
    atoms.strips.append(strip)
    atoms.strip_counter += 1
    atoms._merged = None
    return atoms

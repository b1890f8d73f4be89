"""Experiment configuration, Monte Carlo orchestration, and bound verification.

A run is described by one JSON document (see README for the schema), turned
into an :class:`ExperimentConfig`.  Trials are independent: trial ``i`` of a
run with master seed ``s`` draws its randomness from the stream keyed by
``(s, i)``, so results are reproducible for any worker count; per-trial
results are always reduced in trial order to keep floating-point sums
byte-identical.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bounds import bound_set, modulus_poisson_bound, rho_continuous, rho_discrete
from .errors import ConfigError, ParameterError, RunawayIntensityError
from .kernels import (
    Kernel,
    compact_kernel,
    constant_kernel,
    cosine_decay_kernel,
    erlang_kernel,
    exponential_kernel,
    grid_coefficients,
    inverse_sqrt_kernel,
    tabulated_kernel,
    zero_kernel,
)
from .metrics import (
    MetricConfig,
    PowerLawFit,
    fit_powerlaw,
    modulus_sparse,
    skorokhod_distance,
    skorokhod_upper_bound,
    sobolev_distance,
)
from .randomness import MarkModel, mark_moments, sample_atoms
from .simulate import (
    JumpRate,
    clipped_affine,
    constant_rate,
    couple,
    eval_intensity,
    integrate_intensity,
    path_to_step,
    relu_affine,
    sigmoid_rate,
    simulate_continuous,
)

__all__ = [
    "ExperimentConfig",
    "ConvergenceRow",
    "ConvergenceReport",
    "BoundVerdict",
    "build_kernel",
    "build_jump_rate",
    "build_mark_model",
    "run_convergence",
    "verify_bounds",
]

METRIC_NAMES = (
    "terminal_count",
    "terminal_risk",
    "sobolev",
    "skorokhod_exact",
    "skorokhod_upper",
)

SKOROKHOD_JUMP_CAP = 500


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, picklable description of one experiment."""

    kernel: dict
    jump_rate: dict
    marks: dict
    horizon: float
    delta_ladder: tuple[float, ...]
    trials: int
    metrics: tuple[str, ...]
    sobolev_eta: float = 0.25
    seed: int = 0
    allow_unstable: bool = False
    output_dir: str | None = None
    workers: int | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        required = ("kernel", "jump_rate", "marks", "horizon", "delta_ladder", "trials")
        for key in required:
            if key not in doc:
                raise ConfigError(f"config is missing required key {key!r}")
        ladder = tuple(float(d) for d in doc["delta_ladder"])
        if len(ladder) == 0:
            raise ConfigError("delta_ladder must be nonempty")
        if any(b >= a for a, b in zip(ladder[:-1], ladder[1:])):
            raise ConfigError("delta_ladder must be strictly decreasing")
        horizon = float(doc["horizon"])
        if horizon <= 0:
            raise ConfigError("horizon must be positive")
        for d in ladder:
            ratio = horizon / d
            if d <= 0 or abs(ratio - round(ratio)) > 1e-9 * max(ratio, 1.0):
                raise ConfigError(f"horizon must be an integer multiple of delta={d}")
        trials = int(doc["trials"])
        if trials < 2:
            raise ConfigError("trials must be >= 2")
        metrics = tuple(doc.get("metrics", ["terminal_count"]))
        for m in metrics:
            if m not in METRIC_NAMES:
                raise ConfigError(f"unknown metric {m!r}; choose from {METRIC_NAMES}")
        eta = float(doc.get("sobolev_eta", 0.25))
        if not 0.0 < eta < 1.0:
            raise ConfigError("sobolev_eta must lie in (0, 1)")
        cfg = cls(
            kernel=dict(doc["kernel"]),
            jump_rate=dict(doc["jump_rate"]),
            marks=dict(doc["marks"]),
            horizon=horizon,
            delta_ladder=ladder,
            trials=trials,
            metrics=metrics,
            sobolev_eta=eta,
            seed=int(doc.get("seed", 0)),
            allow_unstable=bool(doc.get("allow_unstable", False)),
            output_dir=doc.get("output_dir"),
            workers=(int(doc["workers"]) if doc.get("workers") is not None else None),
        )
        # fail fast on bad component specs
        build_kernel(cfg.kernel, cfg.horizon)
        build_jump_rate(cfg.jump_rate)
        build_mark_model(cfg.marks)
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)

    def effective_workers(self) -> int:
        if self.workers is not None:
            return max(1, self.workers)
        return max(1, int(os.environ.get("HAWKPATH_WORKERS", "1")))


def _require(spec: dict, key: str, context: str):
    if key not in spec:
        raise ConfigError(f"{context} spec is missing {key!r}")
    return spec[key]


def build_kernel(spec: dict, horizon: float) -> Kernel:
    """Construct a kernel from its config block {family, params...}."""
    family = _require(spec, "family", "kernel")
    params = spec.get("params", {})
    try:
        if family == "exponential":
            return exponential_kernel(params["amplitude"], params["decay"], horizon)
        if family == "erlang":
            return erlang_kernel(
                params["amplitude"], params["shape"], params["decay"], horizon
            )
        if family == "cosine-decay":
            return cosine_decay_kernel(params.get("amplitude", 0.6), horizon)
        if family == "inverse-sqrt":
            if "coefficient" in params:
                return inverse_sqrt_kernel(horizon, params["coefficient"])
            return inverse_sqrt_kernel(
                horizon, target_rho=params.get("target_rho", 0.5)
            )
        if family == "compact-support":
            return compact_kernel(params["amplitude"], params["support"], horizon)
        if family == "constant":
            return constant_kernel(params["value"], horizon)
        if family == "zero":
            return zero_kernel(horizon)
        if family == "custom":
            return tabulated_kernel(params["points"], horizon)
    except KeyError as exc:
        raise ConfigError(f"kernel family {family!r} is missing parameter {exc}") from exc
    raise ConfigError(f"unknown kernel family {family!r}")


def build_jump_rate(spec: dict) -> JumpRate:
    family = _require(spec, "family", "jump_rate")
    params = spec.get("params", {})
    try:
        if family == "relu-affine":
            return relu_affine(params["baseline"])
        if family == "clipped-affine":
            return clipped_affine(params["baseline"], params["cap"])
        if family == "sigmoid":
            return sigmoid_rate(params["scale"])
        if family == "constant":
            return constant_rate(params["value"])
    except KeyError as exc:
        raise ConfigError(f"jump_rate family {family!r} is missing parameter {exc}") from exc
    raise ConfigError(f"unknown jump_rate family {family!r}")


def build_mark_model(spec: dict) -> MarkModel:
    dist = _require(spec, "distribution", "marks")
    mod = spec.get("modulation", {"family": "constant-one"})
    dfam = _require(dist, "family", "marks.distribution")
    mfam = _require(mod, "family", "marks.modulation")
    try:
        if dfam == "point-mass":
            dist_params = (float(dist["value"]),)
        elif dfam == "exponential":
            dist_params = (float(dist["rate"]),)
        elif dfam in ("lognormal", "gaussian"):
            dist_params = (float(dist["mean"]), float(dist["sd"]))
        else:
            raise ConfigError(f"unknown mark distribution {dfam!r}")
        if mfam == "constant-one":
            mod_params: tuple[float, ...] = ()
        elif mfam == "indicator":
            mod_params = (float(mod["threshold"]),)
        elif mfam == "absolute-value":
            mod_params = ()
        else:
            raise ConfigError(f"unknown modulation {mfam!r}")
    except KeyError as exc:
        raise ConfigError(f"marks spec is missing parameter {exc}") from exc
    try:
        return MarkModel(
            distribution=dfam, dist_params=dist_params,
            modulation=mfam, mod_params=mod_params,
        )
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def _build_all(cfg: ExperimentConfig) -> tuple[Kernel, JumpRate, MarkModel]:
    return (
        build_kernel(cfg.kernel, cfg.horizon),
        build_jump_rate(cfg.jump_rate),
        build_mark_model(cfg.marks),
    )


# --------------------------------------------------------------------------
# Per-trial metric evaluation
# --------------------------------------------------------------------------

def _trial_metrics(
    kernel: Kernel,
    jump_rate: JumpRate,
    marks: MarkModel,
    cfg: ExperimentConfig,
    delta: float,
    trial: int,
) -> tuple[dict[str, float], bool]:
    """Evaluate every requested metric on one coupled pair; returns (values, downgraded)."""
    T = cfg.horizon
    M = round(T / delta)
    metric_cfg = MetricConfig(eta=cfg.sobolev_eta, skorokhod_max_jumps=SKOROKHOD_JUMP_CAP)
    cont, disc = couple(
        kernel, jump_rate, marks, T, delta,
        seed=(cfg.seed, trial), allow_unstable=cfg.allow_unstable,
    )
    values: dict[str, float] = {}
    downgraded = False
    rc = rd = None
    path_metrics = {"sobolev", "skorokhod_exact", "skorokhod_upper"}
    if path_metrics & set(cfg.metrics):
        rc = path_to_step(cont, "risk")
        rd = path_to_step(disc, "risk")

    def surrogate() -> float:
        grid = delta * np.arange(M + 1)
        return skorokhod_upper_bound(
            rc.value_at(grid), disc.risk, modulus_sparse(rc, delta), delta
        )

    for name in cfg.metrics:
        if name == "terminal_count":
            values[name] = float(abs(cont.terminal_count - disc.terminal_count))
        elif name == "terminal_risk":
            values[name] = abs(cont.terminal_risk - disc.terminal_risk)
        elif name == "sobolev":
            values[name] = sobolev_distance(rc, rd, metric_cfg.eta)
        elif name == "skorokhod_upper":
            values[name] = surrogate()
        elif name == "skorokhod_exact":
            if max(rc.jump_count, rd.jump_count) <= metric_cfg.skorokhod_max_jumps:
                values[name] = skorokhod_distance(
                    rc, rd,
                    tol=metric_cfg.skorokhod_tol,
                    max_jumps=metric_cfg.skorokhod_max_jumps,
                )
            else:
                values[name] = surrogate()
                downgraded = True
    return values, downgraded


def _pool_worker(payload: tuple[dict, float, list[int]]) -> list[tuple[int, dict, bool]]:
    """Process-pool entry point: rebuilds components and runs a trial chunk."""
    doc, delta, trials = payload
    cfg = ExperimentConfig.from_dict(doc)
    kernel, jump_rate, marks = _build_all(cfg)
    out = []
    for t in trials:
        vals, downgraded = _trial_metrics(kernel, jump_rate, marks, cfg, delta, t)
        out.append((t, vals, downgraded))
    return out


def _map_trials(
    cfg: ExperimentConfig, delta: float
) -> tuple[list[dict[str, float]], bool]:
    """All trials for one ladder cell, in trial order regardless of workers."""
    workers = cfg.effective_workers()
    n = cfg.trials
    if workers <= 1:
        kernel, jump_rate, marks = _build_all(cfg)
        results = [
            _trial_metrics(kernel, jump_rate, marks, cfg, delta, t) for t in range(n)
        ]
        return [vals for vals, _ in results], any(d for _, d in results)
    chunks = [list(range(i, n, workers)) for i in range(workers)]
    doc = cfg.to_dict()
    collected: dict[int, tuple[dict, bool]] = {}
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for part in ex.map(_pool_worker, [(doc, delta, c) for c in chunks if c]):
            for t, vals, downgraded in part:
                collected[t] = (vals, downgraded)
    ordered = [collected[t] for t in range(n)]
    return [vals for vals, _ in ordered], any(d for _, d in ordered)


# --------------------------------------------------------------------------
# Convergence experiment
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    delta: float
    metric: str
    mean: float
    stderr: float
    theory_shape: float
    flag: str = ""


@dataclass
class ConvergenceReport:
    """Per-(delta, metric) Monte Carlo summaries, power-law fits, shape verdicts.

    The multiplicative constants of the theorem shapes are existential, so
    the shape verdicts compare only scalings: whether the measured means
    decrease along the ladder and how the fitted exponent relates to the
    exponent of the theory-shape column.
    """

    rows: list[ConvergenceRow] = field(default_factory=list)
    fits: dict[str, PowerLawFit | None] = field(default_factory=dict)
    shape_checks: dict[str, dict] = field(default_factory=dict)
    trials: int = 0

    def mean_table(self, metric: str) -> list[tuple[float, float, float]]:
        """(delta, mean, stderr) rows for one metric, ladder order."""
        return [
            (r.delta, r.mean, r.stderr) for r in self.rows if r.metric == metric
        ]

    def to_csv_text(self) -> str:
        lines = ["delta,metric,mean,stderr,theory_shape,flag"]
        for r in self.rows:
            lines.append(
                f"{r.delta!r},{r.metric},{r.mean!r},{r.stderr!r},{r.theory_shape!r},{r.flag}"
            )
        return "\n".join(lines) + "\n"

    def summary_dict(self) -> dict:
        return {
            "trials": self.trials,
            "fits": {
                m: (None if f is None else asdict(f)) for m, f in self.fits.items()
            },
            "shape_checks": self.shape_checks,
            "rows": [asdict(r) for r in self.rows],
        }


def _theory_shape(cfg: ExperimentConfig, metric: str, delta: float, bset) -> float:
    if metric in ("terminal_count", "terminal_risk"):
        # increment-bound shape between 0 and T, constant normalized to 1
        return bset.kernel_regularity * cfg.horizon + delta
    if metric == "sobolev":
        return bset.sobolev_shape
    if bset.skorokhod_shape_bounded is not None:
        return bset.skorokhod_shape_bounded
    return bset.skorokhod_shape_unbounded


def run_convergence(config: ExperimentConfig) -> ConvergenceReport:
    """Run the full delta ladder and fit error-vs-delta power laws.

    A runaway-intensity error aborts the affected ladder cell only; its rows
    carry NaN statistics and an ``aborted`` flag.
    """
    kernel, jump_rate, marks = _build_all(config)
    report = ConvergenceReport(trials=config.trials)
    per_metric_points: dict[str, list[tuple[float, float]]] = {
        m: [] for m in config.metrics
    }
    for delta in config.delta_ladder:
        bset = bound_set(
            kernel, delta, config.horizon, jump_rate, marks,
            eta=config.sobolev_eta, allow_unstable=config.allow_unstable,
        )
        try:
            trial_values, downgraded = _map_trials(config, delta)
        except RunawayIntensityError as exc:
            for metric in config.metrics:
                report.rows.append(
                    ConvergenceRow(
                        delta, metric, math.nan, math.nan,
                        _theory_shape(config, metric, delta, bset),
                        flag=f"aborted:{exc.__class__.__name__}",
                    )
                )
            continue
        for metric in config.metrics:
            arr = np.array([v[metric] for v in trial_values])
            mean = float(arr.mean())
            se = float(arr.std(ddof=1) / math.sqrt(len(arr)))
            flag = ""
            if metric == "skorokhod_exact" and downgraded:
                flag = "surrogate"
            report.rows.append(
                ConvergenceRow(
                    delta, metric, mean, se,
                    _theory_shape(config, metric, delta, bset), flag,
                )
            )
            per_metric_points[metric].append((delta, mean))
    for metric, pts in per_metric_points.items():
        positive = [(d, m) for d, m in pts if m > 0 and math.isfinite(m)]
        report.fits[metric] = (
            fit_powerlaw(positive) if len(positive) >= 3 else None
        )
        shapes = [
            (r.delta, r.theory_shape) for r in report.rows
            if r.metric == metric and r.theory_shape > 0
        ]
        finite = [m for _, m in pts if math.isfinite(m)]
        report.shape_checks[metric] = {
            "monotone_decreasing": bool(
                len(finite) == len(pts)
                and all(b <= a for a, b in zip(finite[:-1], finite[1:]))
            ),
            "measured_exponent": (
                report.fits[metric].exponent if report.fits[metric] else None
            ),
            "theory_exponent": (
                fit_powerlaw(shapes).exponent if len(shapes) >= 3 else None
            ),
        }
    return report


# --------------------------------------------------------------------------
# Bound verification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundVerdict:
    name: str
    statistic: float
    bound: float
    margin: float
    passed: bool
    detail: str = ""


def _mc_mean_se(arr: np.ndarray) -> tuple[float, float]:
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(len(arr)))


def verify_bounds(config: ExperimentConfig, *, scaling_slope_min: float = 0.45) -> list[BoundVerdict]:
    """Monte Carlo checks of the lemma-level bounds and the increment scaling.

    Stability verdicts are pure arithmetic; the intensity mean bounds,
    martingale zero-means and modulus bound are tested at ``mean <= bound +
    3 standard errors``; the increment mismatch at fixed (s, t) = (T/4,
    3T/4) must scale with a log-log slope of at least ``scaling_slope_min``
    across the ladder (zero errors pass trivially).
    """
    kernel, jump_rate, marks = _build_all(config)
    T = config.horizon
    moments = mark_moments(marks)
    delta_min = config.delta_ladder[-1]
    M_min = round(T / delta_min)
    verdicts: list[BoundVerdict] = []

    rho = rho_continuous(kernel, jump_rate.lipschitz, marks)
    grid = grid_coefficients(kernel, delta_min, M_min)
    rho_d = rho_discrete(grid, jump_rate.lipschitz, marks)
    verdicts.append(
        BoundVerdict("stability_continuous", rho, 1.0, 1.0 - rho, rho < 1.0)
    )
    verdicts.append(
        BoundVerdict(
            "stability_discrete", rho_d, 1.0, 1.0 - rho_d, rho_d < 1.0,
            detail=f"delta={delta_min}",
        )
    )

    # one coupled pass at the smallest step feeds the mean and martingale checks
    n = config.trials
    ts = T * np.arange(1, 21) / 20.0
    grid_idx = np.unique(np.linspace(1, M_min, 20, dtype=int))
    lam_samples = np.empty((n, len(ts)))
    l_samples = np.empty((n, len(grid_idx)))
    xi_cont = np.empty(n)
    xi_disc = np.empty(n)
    for t in range(n):
        cont, disc = couple(
            kernel, jump_rate, marks, T, delta_min,
            seed=(config.seed, t), allow_unstable=config.allow_unstable,
        )
        lam_samples[t] = [eval_intensity(cont, kernel, jump_rate, u) for u in ts]
        l_samples[t] = disc.intensity[grid_idx]
        xi_cont[t] = cont.terminal_risk - moments.mean * integrate_intensity(
            cont, kernel, jump_rate
        )
        xi_disc[t] = disc.terminal_risk - moments.mean * float(
            disc.intensity[1:].sum() * delta_min
        )

    def mean_bound_verdict(name: str, samples: np.ndarray, bound: float | None):
        if bound is None:
            verdicts.append(BoundVerdict(name, math.nan, math.nan, math.nan, False, "unstable"))
            return
        means = samples.mean(axis=0)
        ses = samples.std(axis=0, ddof=1) / math.sqrt(samples.shape[0])
        margins = bound + 3.0 * ses - means
        verdicts.append(
            BoundVerdict(
                name,
                float(means.max()),
                bound,
                float(margins.min()),
                bool(np.all(margins >= 0.0)),
                detail=f"{samples.shape[1]} time points",
            )
        )

    mean_bound_verdict(
        "mean_intensity_continuous", lam_samples,
        jump_rate.at_zero / (1.0 - rho) if rho < 1.0 else None,
    )
    mean_bound_verdict(
        "mean_intensity_discrete", l_samples,
        jump_rate.at_zero / (1.0 - rho_d) if rho_d < 1.0 else None,
    )

    for name, arr in (("martingale_continuous", xi_cont), ("martingale_discrete", xi_disc)):
        mean, se = _mc_mean_se(arr)
        margin = 3.0 * se - abs(mean)
        verdicts.append(
            BoundVerdict(name, mean, 0.0, margin, margin >= 0.0, detail=f"3se={3*se:.4g}")
        )

    # constant-free modulus bound for a compound Poisson path at the dominating rate
    rate = jump_rate.at_zero / (1.0 - rho) if rho < 1.0 else jump_rate.at_zero
    if rate > 0:
        flat_kernel = zero_kernel(T)
        flat_rate = constant_rate(rate)
        mods = np.empty(n)
        for t in range(n):
            atoms = sample_atoms(T, rate, marks, (config.seed, t, 1))
            path = simulate_continuous(flat_kernel, flat_rate, marks, T, atoms)
            mods[t] = modulus_sparse(path_to_step(path, "risk"), delta_min)
        mean, se = _mc_mean_se(mods)
        bound = modulus_poisson_bound(rate, T, delta_min, marks)
        margin = bound + 3.0 * se - mean
        verdicts.append(
            BoundVerdict(
                "modulus_poisson", mean, bound, margin, margin >= 0.0,
                detail=f"rate={rate:.4g} delta={delta_min}",
            )
        )

    # increment mismatch at fixed times across the ladder
    s_t = (0.25 * T, 0.75 * T)
    ladder_means = []
    for delta in config.delta_ladder:
        vals = np.empty(n)
        for t in range(n):
            cont, disc = couple(
                kernel, jump_rate, marks, T, delta,
                seed=(config.seed, t), allow_unstable=config.allow_unstable,
            )
            rc = path_to_step(cont, "risk")
            rd = path_to_step(disc, "risk")
            inc_c = float(rc.value_at(s_t[1]) - rc.value_at(s_t[0]))
            inc_d = float(rd.value_at(s_t[1]) - rd.value_at(s_t[0]))
            vals[t] = abs(inc_c - inc_d)
        ladder_means.append((delta, float(vals.mean())))
    if all(m < 1e-12 for _, m in ladder_means):
        verdicts.append(
            BoundVerdict("increment_scaling", 0.0, scaling_slope_min, 0.0, True,
                         detail="all increments match exactly")
        )
    else:
        positive = [(d, m) for d, m in ladder_means if m > 0]
        if len(positive) >= 3:
            fit = fit_powerlaw(positive)
            verdicts.append(
                BoundVerdict(
                    "increment_scaling", fit.exponent, scaling_slope_min,
                    fit.exponent - scaling_slope_min, fit.exponent >= scaling_slope_min,
                    detail=f"fit over {len(positive)} deltas",
                )
            )
        else:
            verdicts.append(
                BoundVerdict("increment_scaling", math.nan, scaling_slope_min,
                             math.nan, False, detail="too few positive points")
            )
    return verdicts


def verdicts_csv_text(verdicts: list[BoundVerdict]) -> str:
    lines = ["check,statistic,bound,margin,passed,detail"]
    for v in verdicts:
        lines.append(
            f"{v.name},{v.statistic!r},{v.bound!r},{v.margin!r},{v.passed},{v.detail}"
        )
    return "\n".join(lines) + "\n"


def verdicts_json(verdicts: list[BoundVerdict]) -> str:
    return json.dumps([asdict(v) for v in verdicts], indent=2, sort_keys=True)

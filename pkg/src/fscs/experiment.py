"""Sampling-period sweeps: afCS/fCS table and reconstruction success-ratio map.

Every random quantity is derived from ``ExperimentConfig.seed`` through
``numpy.random.SeedSequence`` spawn keys built from the position of the draw
(test matrix, or period/interferer count/trial index), never from execution
order.  Outputs are therefore identical for any cell ordering or worker count.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._errors import ConfigError, DegenerateAcquisitionError, InvalidArgumentError, NonConvergenceError
from .acquisition import compose_and_normalize, observe, uniform_sensing_matrix
from .dictionary import band_indices, build_dht_dictionary
from .fcs_metric import ABSOLUTE, VERBATIM, afcs, draw_test_matrix
from .reconstruction import LassoConfig, reconstruct_band, snr_db, solve_lasso
from .signal_model import PROBLEMS, FilteringProblem, draw_random_case, make_time_grid, synth_case

log = logging.getLogger(__name__)

AFCS_SWEEP = (20e-6, 30e-6, 0.5e-6)
SUCCESS_SWEEP = (25e-6, 30e-6, 0.5e-6)
DESK_TRIALS = 1_000
FULL_TRIALS = 10_000

_OMEGA_KEY = 0
_TRIAL_KEY = 1


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str = "P1"
    # one period of the 5 kHz tone; N < 2K at every swept period
    window: float = 0.2e-3
    resolution: float = 0.5e-6
    K: int = 5
    delta_f: float = 5e3
    B_b: float | None = None
    period_sweep: tuple[float, float, float] | None = None
    N_I_range: tuple[int, ...] | None = None
    trials_per_cell: int = DESK_TRIALS
    W: int = 1000
    seed: int = 1
    lasso: LassoConfig = field(default_factory=LassoConfig)
    snr_threshold_db: float = 25.0
    report_columns: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.problem not in (*PROBLEMS, "custom"):
            raise ConfigError(f"problem must be P1, P2 or custom, got {self.problem!r}")
        if self.B_b is None:
            if self.problem == "custom":
                raise ConfigError("a custom problem needs B_b")
            object.__setattr__(self, "B_b", PROBLEMS[self.problem].B_b)
        if self.period_sweep is not None:
            start, stop, step = self.period_sweep
            if not (start > 0 and step > 0 and start <= stop):
                raise ConfigError("period_sweep needs 0 < start <= stop and step > 0")
        if self.trials_per_cell < 1 or self.W < 1:
            raise ConfigError("trials_per_cell and W must be >= 1")
        try:
            problem = self.filtering_problem()
            make_time_grid(self.window, self.resolution)
        except InvalidArgumentError as exc:
            raise ConfigError(str(exc)) from exc
        if problem.N_b < 1:
            raise ConfigError("the wanted band contains no dictionary frequency")
        for n in self.interferer_counts():
            if not 0 <= n <= problem.max_interferers:
                raise ConfigError(f"N_I={n} outside 0..{problem.max_interferers}")
        for k in self.report_columns or ():
            if not 1 <= k <= 2 * self.K:
                raise ConfigError(f"report column {k} outside 1..{2 * self.K}")

    def filtering_problem(self) -> FilteringProblem:
        base = FilteringProblem(self.K * self.delta_f, self.B_b, self.K, self.delta_f)
        return dataclasses.replace(base, S=base.N_b + max(self.interferer_counts(base)))

    def interferer_counts(self, problem: FilteringProblem | None = None) -> tuple[int, ...]:
        if self.N_I_range is not None:
            return tuple(self.N_I_range)
        problem = problem or FilteringProblem(self.K * self.delta_f, self.B_b, self.K, self.delta_f)
        return tuple(range(problem.max_interferers + 1))

    def band(self):
        return band_indices(self.K, self.delta_f, self.B_b)

    def columns_to_report(self) -> tuple[int, ...]:
        if self.report_columns is not None:
            return tuple(self.report_columns)
        # band of the two-tone problem (columns 4..7 for K=5)
        return band_indices(self.K, self.delta_f, min(2, self.K) * self.delta_f).indices

    def period_steps(self, default=SUCCESS_SWEEP) -> list[int]:
        """Swept periods as integer counts of grid steps."""
        start, stop, step = self.period_sweep or default
        grid = make_time_grid(self.window, self.resolution)
        try:
            a, b, h = grid.steps(start), grid.steps(stop), grid.steps(step)
        except InvalidArgumentError as exc:
            raise ConfigError(str(exc)) from exc
        return list(range(a, b + 1, h))


# ---------------------------------------------------------------- config files

_SCALARS = {
    "problem": str,
    "window": float,
    "resolution": float,
    "K": int,
    "delta_f": float,
    "B_b": float,
    "trials_per_cell": int,
    "W": int,
    "seed": int,
    "snr_threshold_db": float,
}
_LISTS = {"period_sweep": float, "N_I_range": int, "report_columns": int}
_LASSO = {"k_reg": float, "max_iters": int, "tol": float, "polish_every": int}


def _int(text):
    value = float(text)
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines (``#`` comments, comma-separated lists, ``lasso.*`` keys).

    Unknown or repeated keys are rejected.
    """
    values, lasso, seen = {}, {}, set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            key, sep, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        try:
            if key in _SCALARS:
                kind = _SCALARS[key]
                values[key] = _int(value) if kind is int else kind(value)
            elif key in _LISTS:
                kind = _int if _LISTS[key] is int else float
                values[key] = tuple(kind(v) for v in value.strip("[]()").split(",") if v.strip())
            elif key.startswith("lasso.") and key[6:] in _LASSO:
                name = key[6:]
                if name == "polish_every" and value.lower() == "none":
                    lasso[name] = None
                else:
                    lasso[name] = _int(value) if _LASSO[name] is int else float(value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    if "period_sweep" in values and len(values["period_sweep"]) != 3:
        raise ConfigError("period_sweep takes exactly three values: start, stop, step")
    try:
        values["lasso"] = LassoConfig(**lasso)
        return ExperimentConfig(**values)
    except ConfigError:
        raise
    except (InvalidArgumentError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def format_config(config: ExperimentConfig) -> str:
    """Inverse of ``parse_config``."""
    lines = []
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        if f.name == "lasso":
            for lf in dataclasses.fields(value):
                lines.append(f"lasso.{lf.name} = {getattr(value, lf.name)!r}")
        elif value is None:
            continue
        elif isinstance(value, tuple):
            lines.append(f"{f.name} = " + ", ".join(repr(v) for v in value))
        else:
            lines.append(f"{f.name} = {value}" if isinstance(value, str) else f"{f.name} = {value!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- seeding


def _period_key(T_s: float) -> int:
    return int(round(T_s * 1e12))  # picoseconds


def omega_seed(seed: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(_OMEGA_KEY,))


def derive_trial_seed(seed: int, T_s: float, n_interferers: int, trial: int) -> int:
    """Position-derived 64-bit seed for one trial."""
    ss = np.random.SeedSequence(seed, spawn_key=(_TRIAL_KEY, _period_key(T_s), n_interferers, trial))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# ---------------------------------------------------------------- shared geometry


@dataclass(frozen=True, eq=False)
class _Setup:
    grid: object
    dictionary: object
    phi: object
    system: object  # None when degenerate
    error: str | None


@lru_cache(maxsize=128)
def _setup(window, resolution, K, delta_f, B_b, step) -> _Setup:
    grid = make_time_grid(window, resolution)
    psi = build_dht_dictionary(grid, K, delta_f)
    phi = uniform_sensing_matrix(grid, step * resolution)
    try:
        system = compose_and_normalize(phi, psi, band_indices(K, delta_f, B_b))
    except DegenerateAcquisitionError as exc:
        return _Setup(grid, psi, phi, None, str(exc))
    return _Setup(grid, psi, phi, system, None)


def _setup_for(config: ExperimentConfig, step: int) -> _Setup:
    return _setup(config.window, config.resolution, config.K, config.delta_f, config.B_b, step)


# ---------------------------------------------------------------- afCS sweep


@dataclass
class AfcsSweep:
    periods: list[float]
    columns: tuple[int, ...]
    zeta: dict[float, dict[int, float]]
    xi: dict[float, float]
    xi_verbatim: dict[float, float] = field(default_factory=dict)
    degenerate: dict[float, str] = field(default_factory=dict)

    @property
    def all_degenerate(self) -> bool:
        return bool(self.periods) and len(self.degenerate) == len(self.periods)


def afcs_sweep(config: ExperimentConfig, verbose: bool = False) -> AfcsSweep:
    """zeta_k for the report columns and xi for the configured band at every period.

    One test matrix (drawn from the config seed) is shared by every period.
    """
    omega = draw_test_matrix(config.K, config.W, omega_seed(config.seed))
    band = config.band()
    columns = config.columns_to_report()
    out = AfcsSweep([], columns, {}, {})
    for step in config.period_steps(AFCS_SWEEP):
        setup = _setup_for(config, step)
        T_s = setup.phi.T_s
        out.periods.append(T_s)
        if setup.system is None:
            log.warning("degenerate acquisition: %s", setup.error)
            out.degenerate[T_s] = setup.error
            out.zeta[T_s] = {k: float("nan") for k in columns}
            out.xi[T_s] = float("nan")
            continue
        needed = sorted(set(columns) | set(band.indices))
        res = afcs(setup.system, needed, omega)
        out.zeta[T_s] = {k: res.zeta[k] for k in columns}
        out.xi[T_s] = max(res.zeta[k] for k in band.indices)
        if verbose:
            verb = afcs(setup.system, band.indices, omega, convention=VERBATIM)
            out.xi_verbatim[T_s] = max(verb.zeta.values())
            log.info(
                "T_s=%.12g xi[%s]=%.6g xi[%s]=%.6g mean=%s p95=%s",
                T_s, ABSOLUTE, out.xi[T_s], VERBATIM, out.xi_verbatim[T_s],
                res.mean(), res.percentile95(),
            )
    return out


# ---------------------------------------------------------------- trials


@dataclass(frozen=True)
class TrialOutcome:
    case_digest: str
    snr_db: float
    success: bool
    iterations: int
    kkt_residual: float
    converged: bool = True
    error: str | None = None

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def case_digest(case) -> str:
    return hashlib.sha256(repr(case).encode()).hexdigest()[:16]


def _trial(config: ExperimentConfig, setup: _Setup, problem, n_interferers, trial_seed):
    rng = np.random.default_rng(trial_seed)
    case = draw_random_case(problem, problem.N_b, n_interferers, rng)
    digest = case_digest(case)
    if setup.system is None:
        return TrialOutcome(digest, float("-inf"), False, 0, float("nan"), False, setup.error)
    x, s_b = synth_case(setup.grid, case)
    y = observe(setup.phi, x)
    try:
        sol = solve_lasso(setup.system, y, config.lasso)
        v, iters, resid, converged = sol.v_hat, sol.iterations, sol.kkt_residual, True
    except NonConvergenceError as exc:
        v, iters, resid, converged = exc.best, exc.iterations, exc.residual, False
    s_hat = reconstruct_band(setup.dictionary, setup.system.band, v, setup.system.column_norms)
    snr = snr_db(s_b, s_hat)
    success = converged and snr >= config.snr_threshold_db
    return TrialOutcome(digest, snr, success, iters, resid, converged)


def run_trial(config: ExperimentConfig, T_s: float, n_interferers: int, trial_seed: int) -> TrialOutcome:
    """One random case at period ``T_s`` with ``n_interferers`` interferers."""
    grid = make_time_grid(config.window, config.resolution)
    step = grid.steps(T_s)
    problem = config.filtering_problem()
    if not 0 <= n_interferers <= problem.max_interferers:
        raise InvalidArgumentError(f"N_I={n_interferers} outside 0..{problem.max_interferers}")
    return _trial(config, _setup_for(config, step), problem, n_interferers, trial_seed)


# ---------------------------------------------------------------- success map


@dataclass(frozen=True)
class Cell:
    period: float
    n_interferers: int
    trials: int
    successes: int
    nonconverged: int
    degenerate: bool = False

    @property
    def ratio(self) -> float:
        return self.successes / self.trials


@dataclass
class SuccessMap:
    cells: list[Cell]

    def ratio(self, period: float, n_interferers: int) -> float:
        return self.cell(period, n_interferers).ratio

    def cell(self, period: float, n_interferers: int) -> Cell:
        key = _period_key(period)
        for c in self.cells:
            if _period_key(c.period) == key and c.n_interferers == n_interferers:
                return c
        raise KeyError((period, n_interferers))

    @property
    def periods(self) -> list[float]:
        return sorted({c.period for c in self.cells})

    @property
    def all_degenerate(self) -> bool:
        return bool(self.cells) and all(c.degenerate for c in self.cells)


def _run_cell(args) -> Cell:
    config, step, n_interferers = args
    setup = _setup_for(config, step)
    problem = config.filtering_problem()
    T_s = setup.phi.T_s
    successes = nonconverged = 0
    for i in range(config.trials_per_cell):
        seed = derive_trial_seed(config.seed, T_s, n_interferers, i)
        out = _trial(config, setup, problem, n_interferers, seed)
        successes += out.success
        nonconverged += setup.system is not None and not out.converged
    log.debug("cell T_s=%.12g N_I=%d: %d/%d", T_s, n_interferers, successes, config.trials_per_cell)
    return Cell(T_s, n_interferers, config.trials_per_cell, successes, nonconverged, setup.system is None)


def success_map(config: ExperimentConfig, workers: int = 1) -> SuccessMap:
    """Success ratio (SNR of the wanted band >= threshold) for each (period, N_I) cell."""
    jobs = [(config, step, n) for step in config.period_steps(SUCCESS_SWEEP) for n in config.interferer_counts()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell, jobs))
    else:
        cells = [_run_cell(job) for job in jobs]
    return SuccessMap(cells)


# ---------------------------------------------------------------- CSV output


def _g(x) -> str:
    return f"{x:.12g}"


def write_afcs_csv(sweep: AfcsSweep, path, xi_path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["period_s", "column", "zeta"])
        for T_s in sweep.periods:
            for k in sweep.columns:
                w.writerow([_g(T_s), k, _g(sweep.zeta[T_s][k])])
    with open(xi_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["period_s", "xi"])
        for T_s in sweep.periods:
            w.writerow([_g(T_s), _g(sweep.xi[T_s])])


def write_success_csv(smap: SuccessMap, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["period_s", "n_interferers", "trials", "successes", "ratio", "nonconverged"])
        for c in smap.cells:
            w.writerow([_g(c.period), c.n_interferers, c.trials, c.successes, _g(c.ratio), c.nonconverged])

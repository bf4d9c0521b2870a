"""Time grid, multi-tone synthesis and randomized trial cases.

Continuous-time quantities live on a fine uniform grid ``t_m = m * resolution``.
Sampling periods must be integer multiples of the resolution so that every
observation is an exact grid sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._errors import InvalidArgumentError
from ._numeric import as_integer_ratio, floor_ratio

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class TimeGrid:
    window: float
    resolution: float
    M: int
    times: np.ndarray = field(repr=False)

    def steps(self, duration: float) -> int:
        """Number of grid steps in ``duration``; raises if it is not on the grid."""
        n = as_integer_ratio(duration, self.resolution)
        if n is None:
            raise InvalidArgumentError(
                f"{duration!r} s is not a multiple of the grid resolution {self.resolution!r} s"
            )
        return n


def make_time_grid(window: float, resolution: float) -> TimeGrid:
    if not (window > 0 and resolution > 0):
        raise InvalidArgumentError("window and resolution must be positive")
    if floor_ratio(window, resolution) < 1:
        raise InvalidArgumentError("window must be at least one resolution step")
    M = floor_ratio(window, resolution)
    times = np.arange(M) * resolution
    times.flags.writeable = False
    return TimeGrid(float(window), float(resolution), M, times)


@dataclass(frozen=True)
class Tone:
    frequency: float
    amplitude: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        if not self.frequency > 0:
            raise InvalidArgumentError(f"tone frequency must be positive, got {self.frequency}")
        if not self.amplitude >= 0:
            raise InvalidArgumentError(f"tone amplitude must be >= 0, got {self.amplitude}")
        if not 0 <= self.phase < TWO_PI:
            raise InvalidArgumentError(f"tone phase must lie in [0, 2pi), got {self.phase}")


@dataclass(frozen=True)
class FilteringProblem:
    """A filtering problem: interfered baseband, wanted baseband, dictionary layout, sparsity.

    ``S`` counts tones (wanted + at most ``K - N_b`` interferers), not coefficients.
    """

    B_x_dag: float
    B_b: float
    K: int
    delta_f: float
    S: int | None = None

    def __post_init__(self):
        if not (self.K >= 1 and self.delta_f > 0):
            raise InvalidArgumentError("K must be >= 1 and delta_f > 0")
        if not 0 < self.B_b <= self.B_x_dag:
            raise InvalidArgumentError("need 0 < B_b <= B_x_dag")
        if as_integer_ratio(self.B_x_dag, self.delta_f) != self.K:
            raise InvalidArgumentError("dictionary must span the full band: K * delta_f == B_x_dag")
        if self.S is None:
            object.__setattr__(self, "S", self.K)

    @property
    def lattice(self) -> np.ndarray:
        """Tone frequencies representable by the dictionary: delta_f, 2 delta_f, ..., K delta_f."""
        return self.delta_f * np.arange(1, self.K + 1)

    @property
    def N_b(self) -> int:
        """Number of lattice frequencies inside the wanted band."""
        return min(floor_ratio(self.B_b, self.delta_f), self.K)

    @property
    def max_interferers(self) -> int:
        return self.K - self.N_b


PROBLEMS = {
    "P1": FilteringProblem(B_x_dag=25e3, B_b=5e3, K=5, delta_f=5e3, S=5),
    "P2": FilteringProblem(B_x_dag=25e3, B_b=10e3, K=5, delta_f=5e3, S=5),
}


@dataclass(frozen=True)
class CaseSpec:
    wanted_tones: tuple[Tone, ...] = ()
    interference_tones: tuple[Tone, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "wanted_tones", tuple(self.wanted_tones))
        object.__setattr__(self, "interference_tones", tuple(self.interference_tones))
        freqs = [t.frequency for t in self.tones]
        if len(set(freqs)) != len(freqs):
            raise InvalidArgumentError("tone frequencies must be distinct")

    @property
    def tones(self) -> tuple[Tone, ...]:
        return self.wanted_tones + self.interference_tones

    @property
    def N_b(self) -> int:
        return len(self.wanted_tones)

    @property
    def N_I(self) -> int:
        return len(self.interference_tones)

    def validate(self, problem: FilteringProblem) -> None:
        """Check band membership and lattice placement against ``problem``."""
        for t in self.tones:
            q = as_integer_ratio(t.frequency, problem.delta_f)
            if q is None or not 1 <= q <= problem.K:
                raise InvalidArgumentError(f"{t.frequency} Hz is not on the dictionary lattice")
        if any(t.frequency > problem.B_b * (1 + 1e-12) for t in self.wanted_tones):
            raise InvalidArgumentError("wanted tones must lie inside the wanted band")
        if any(t.frequency <= problem.B_b * (1 + 1e-12) for t in self.interference_tones):
            raise InvalidArgumentError("interference tones must lie above the wanted band")


def synth_tone(grid: TimeGrid, tone: Tone) -> np.ndarray:
    return tone.amplitude * np.cos(TWO_PI * tone.frequency * grid.times + tone.phase)


def synth_case(grid: TimeGrid, case: CaseSpec) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(x, s_b)``: the received mixture and its wanted part."""
    s_b = np.zeros(grid.M)
    for t in case.wanted_tones:
        s_b += synth_tone(grid, t)
    x = s_b.copy()
    for t in case.interference_tones:
        x += synth_tone(grid, t)
    return x, s_b


AMPLITUDE_RANGE = (0.2, 1.0)


def _random_tone(freq, rng):
    amp = rng.uniform(*AMPLITUDE_RANGE)
    # uniform() is half-open, so the phase stays in [0, 2pi)
    phase = rng.uniform(0.0, TWO_PI)
    return Tone(float(freq), float(amp), float(phase))


def draw_random_case(problem: FilteringProblem, N_b: int, N_I: int, rng) -> CaseSpec:
    """Draw one trial case.

    Wanted tones sit at the ``N_b`` lowest lattice frequencies; interferers at a
    uniformly drawn size-``N_I`` subset of the lattice frequencies above ``B_b``.
    Amplitudes ~ U[0.2, 1.0], phases ~ U[0, 2pi).
    """
    rng = np.random.default_rng(rng)
    if not 0 <= N_b <= problem.N_b:
        raise InvalidArgumentError(
            f"N_b={N_b} exceeds the {problem.N_b} lattice frequencies inside B_b"
        )
    lattice = problem.lattice
    pool = lattice[problem.N_b:]
    if not 0 <= N_I <= len(pool):
        raise InvalidArgumentError(f"N_I={N_I} exceeds the {len(pool)} available interferer slots")
    wanted = tuple(_random_tone(f, rng) for f in lattice[:N_b])
    picked = np.sort(rng.choice(pool, size=N_I, replace=False)) if N_I else ()
    interference = tuple(_random_tone(f, rng) for f in picked)
    return CaseSpec(wanted, interference)

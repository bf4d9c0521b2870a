"""Discrete Hartley dictionary and wanted-band column selection.

Columns are 1-based, ``k = 1..2K``.  The first K columns carry the negative
frequencies ``(k - K - 1) * delta_f`` and the last K the positive frequencies
``(k - K) * delta_f``, so columns ``k`` and ``2K + 1 - k`` form a +/- pair and
the wanted band sits in the middle of the matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._errors import InvalidArgumentError
from ._numeric import ceil_ratio
from .signal_model import TWO_PI, TimeGrid, Tone


def cas(x):
    """Hartley kernel cos(x) + sin(x)."""
    return np.cos(x) + np.sin(x)


def column_frequency(K: int, delta_f: float, k: int) -> float:
    if not 1 <= k <= 2 * K:
        raise InvalidArgumentError(f"column index {k} outside 1..{2 * K}")
    if k <= K:
        return (-K + k - 1) * delta_f
    return (-K + k) * delta_f


def column_frequencies(K: int, delta_f: float) -> np.ndarray:
    return np.array([column_frequency(K, delta_f, k) for k in range(1, 2 * K + 1)])


@dataclass(frozen=True, eq=False)
class Dictionary:
    matrix: np.ndarray = field(repr=False)
    K: int
    delta_f: float
    grid: TimeGrid = field(repr=False)

    @property
    def frequencies(self) -> np.ndarray:
        return column_frequencies(self.K, self.delta_f)

    def column(self, k: int) -> np.ndarray:
        return self.matrix[:, k - 1]


def build_dht_dictionary(grid: TimeGrid, K: int, delta_f: float) -> Dictionary:
    """M x 2K matrix with ``Psi[m, k] = cas(2 pi f_k t_m)``; atoms are not normalized."""
    if K < 1 or not delta_f > 0:
        raise InvalidArgumentError("K must be >= 1 and delta_f > 0")
    nyquist = 0.5 / grid.resolution
    if K * delta_f > nyquist * (1 + 1e-12):
        raise InvalidArgumentError(
            f"top dictionary frequency {K * delta_f} Hz exceeds grid Nyquist {nyquist} Hz"
        )
    freqs = column_frequencies(K, delta_f)
    matrix = cas(TWO_PI * np.outer(grid.times, freqs))
    matrix.flags.writeable = False
    return Dictionary(matrix, K, float(delta_f), grid)


def tone_columns(K: int, delta_f: float, frequency: float) -> tuple[int, int]:
    """1-based (negative, positive) column indices of a lattice frequency."""
    q = round(frequency / delta_f)
    if not 1 <= q <= K or abs(frequency - q * delta_f) > 1e-9 * delta_f:
        raise InvalidArgumentError(f"{frequency} Hz is not a dictionary frequency")
    return K + 1 - q, K + q


def expand_tone(K: int, delta_f: float, tone: Tone) -> np.ndarray:
    """Length-2K coefficient vector with ``Psi @ v`` equal to the tone.

    A cos(x + phi) = a cas(-x) + b cas(x) with a = A/2 (cos phi + sin phi)
    and b = A/2 (cos phi - sin phi).
    """
    v = np.zeros(2 * K)
    k_neg, k_pos = tone_columns(K, delta_f, tone.frequency)
    c, s = np.cos(tone.phase), np.sin(tone.phase)
    v[k_neg - 1] += 0.5 * tone.amplitude * (c + s)
    v[k_pos - 1] += 0.5 * tone.amplitude * (c - s)
    return v


@dataclass(frozen=True)
class BandIndexSet:
    indices: tuple[int, ...]
    alpha: int

    @property
    def zero_based(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=int) - 1

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)


def band_indices(K: int, delta_f: float, B_b: float) -> BandIndexSet:
    """Columns covering the wanted band: ``K - alpha + 1 .. K + alpha``, alpha = ceil(B_b / delta_f)."""
    if not 0 < B_b <= K * delta_f * (1 + 1e-12):
        raise InvalidArgumentError(f"B_b={B_b} outside (0, {K * delta_f}]")
    alpha = ceil_ratio(B_b, delta_f)
    return BandIndexSet(tuple(range(K - alpha + 1, K + alpha + 1)), alpha)


def band_subdictionary(dictionary: Dictionary, band: BandIndexSet) -> np.ndarray:
    idx = band.zero_based
    if idx.min() < 0 or idx.max() >= 2 * dictionary.K:
        raise InvalidArgumentError("band indices outside the dictionary")
    return dictionary.matrix[:, idx]

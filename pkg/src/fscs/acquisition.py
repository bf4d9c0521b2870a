"""Uniform sampler as a row-selection sensing matrix, and the normalized system Theta."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._errors import DegenerateAcquisitionError, InvalidArgumentError
from ._numeric import floor_ratio
from .dictionary import BandIndexSet, Dictionary
from .signal_model import TimeGrid


@dataclass(frozen=True, eq=False)
class SensingMatrix:
    """Phi in R^{N x M}, stored as the selected fine-grid row indices."""

    selected_rows: np.ndarray = field(repr=False)
    N: int
    T_s: float
    M: int
    step: int
    offset: int = 0

    def dense(self) -> np.ndarray:
        phi = np.zeros((self.N, self.M))
        phi[np.arange(self.N), self.selected_rows] = 1.0
        return phi


def uniform_sensing_matrix(grid: TimeGrid, T_s: float, offset: float = 0.0) -> SensingMatrix:
    """Sample at ``offset + n * T_s`` for ``n < N = floor((window - offset) / T_s)``.

    ``T_s`` and ``offset`` must land exactly on the grid; nothing is rounded.
    """
    if not T_s > 0 or offset < 0:
        raise InvalidArgumentError("T_s must be positive and offset non-negative")
    if T_s > grid.window * (1 + 1e-12):
        raise InvalidArgumentError("sampling period longer than the observation window")
    step = grid.steps(T_s)
    first = grid.steps(offset) if offset else 0
    N = floor_ratio(grid.window - offset, T_s)
    rows = first + step * np.arange(N)
    if N < 1 or rows[-1] >= grid.M:
        raise InvalidArgumentError("offset leaves no sample inside the window")
    rows.flags.writeable = False
    return SensingMatrix(rows, N, float(T_s), grid.M, step, first)


def observe(phi: SensingMatrix, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[0] != phi.M:
        raise InvalidArgumentError(f"signal length {x.shape[0]} != M={phi.M}")
    return x[phi.selected_rows]


def normalize_columns(matrix):
    """Column-wise unit Euclidean normalization; returns ``(normalized, norms)``."""
    norms = np.linalg.norm(matrix, axis=0)
    return matrix / norms, norms


@dataclass(frozen=True, eq=False)
class NormalizedSystem:
    theta: np.ndarray = field(repr=False)
    column_norms: np.ndarray
    band: BandIndexSet | None = None
    T_s: float | None = None

    @property
    def shape(self):
        return self.theta.shape

    def column(self, k: int) -> np.ndarray:
        return self.theta[:, k - 1]

    @property
    def gram(self) -> np.ndarray:
        return self.theta.T @ self.theta


# |cas| <= sqrt(2), so a genuine column has norm of order sqrt(N)
_ZERO_COLUMN = 1e-10


def compose_and_normalize(
    phi: SensingMatrix, psi: Dictionary, band: BandIndexSet | None = None
) -> NormalizedSystem:
    """Theta = column-normalized Phi @ Psi, keeping the raw column norms."""
    if phi.M != psi.matrix.shape[0]:
        raise InvalidArgumentError(f"Phi has M={phi.M} columns, Psi has {psi.matrix.shape[0]} rows")
    raw = psi.matrix[phi.selected_rows]
    norms = np.linalg.norm(raw, axis=0)
    dead = np.flatnonzero(norms <= _ZERO_COLUMN * np.sqrt(phi.N))
    if dead.size:
        raise DegenerateAcquisitionError(dead + 1, period=phi.T_s)
    theta = raw / norms
    theta.flags.writeable = False
    return NormalizedSystem(theta, norms, band, phi.T_s)

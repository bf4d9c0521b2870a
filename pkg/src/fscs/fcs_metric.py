"""Atomic filtering-CS parameter zeta_k and the filtering-CS parameter xi.

For column ``theta_k`` of the normalized system and a unit test vector ``omega``,
the projection of ``Theta @ omega`` onto ``theta_k`` has length equal to the
coefficient ``omega[k]`` only when ``theta_k`` is orthogonal to every other
column.  zeta_k measures the worst discrepancy over W random test vectors;
xi is the worst zeta_k over the wanted-band columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._errors import InvalidArgumentError
from .acquisition import NormalizedSystem
from .dictionary import BandIndexSet

ABSOLUTE = "absolute"
VERBATIM = "verbatim"
_CONVENTIONS = (ABSOLUTE, VERBATIM)


@dataclass(frozen=True, eq=False)
class TestMatrix:
    __test__ = False  # not a pytest class

    omega: np.ndarray = field(repr=False)
    W: int
    seed: int | None = None


def draw_test_matrix(K: int, W: int, rng=None) -> TestMatrix:
    """2K x W Gaussian matrix with unit-norm columns.

    ``rng`` may be an int seed, a ``SeedSequence`` or a ``Generator``.
    """
    if W < 1 or K < 1:
        raise InvalidArgumentError("need K >= 1 and W >= 1")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    gen = np.random.default_rng(rng)
    raw = gen.standard_normal((2 * K, W))
    omega = raw / np.linalg.norm(raw, axis=0)
    omega.flags.writeable = False
    return TestMatrix(omega, W, None if seed is None else int(seed))


@dataclass(frozen=True, eq=False)
class AfcsResult:
    zeta: dict[int, float]
    per_vector: np.ndarray | None = field(default=None, repr=False)
    convention: str = ABSOLUTE

    @property
    def columns(self) -> tuple[int, ...]:
        return tuple(self.zeta)

    # diagnostics only; the metric itself is the max over test vectors
    def mean(self) -> dict[int, float]:
        return {k: float(row.mean()) for k, row in zip(self.zeta, self.per_vector)}

    def percentile95(self) -> dict[int, float]:
        return {k: float(np.percentile(row, 95)) for k, row in zip(self.zeta, self.per_vector)}


def _check_column(system: NormalizedSystem, k: int) -> None:
    n_cols = system.theta.shape[1]
    if not 1 <= k <= n_cols:
        raise InvalidArgumentError(f"column index {k} outside 1..{n_cols}")


def _check_omega(system: NormalizedSystem, omega: TestMatrix) -> None:
    if omega.omega.shape[0] != system.theta.shape[1]:
        raise InvalidArgumentError(
            f"test vectors have {omega.omega.shape[0]} rows, system has {system.theta.shape[1]} columns"
        )


def projection_onto_column(system: NormalizedSystem, k: int) -> np.ndarray:
    """P_k = theta_k (theta_k^T theta_k)^{-1} theta_k^T."""
    _check_column(system, k)
    t = system.column(k)[:, None]
    return t @ t.T / (t.T @ t)


def atomic_fcs(
    system: NormalizedSystem, k: int, omega: TestMatrix, convention: str = ABSOLUTE
) -> tuple[float, np.ndarray]:
    """Return ``(zeta_k, zeta_{k,w} for all w)``.

    ``convention="absolute"`` compares the projected length with ``|Omega(k, w)|``
    so that an orthonormal system scores exactly zero; ``"verbatim"`` compares
    with the signed ``Omega(k, w)``.
    """
    if convention not in _CONVENTIONS:
        raise InvalidArgumentError(f"convention must be one of {_CONVENTIONS}")
    _check_column(system, k)
    _check_omega(system, omega)
    A = system.theta @ omega.omega
    gamma = projection_onto_column(system, k) @ A
    lengths = np.linalg.norm(gamma, axis=0)
    ref = omega.omega[k - 1]
    if convention == ABSOLUTE:
        ref = np.abs(ref)
    per_vector = np.abs(lengths - ref)
    return float(per_vector.max()), per_vector


def afcs(
    system: NormalizedSystem, columns, omega: TestMatrix, convention: str = ABSOLUTE
) -> AfcsResult:
    """zeta_k for every column in ``columns``, all against the same test matrix."""
    columns = [int(k) for k in columns]
    rows = []
    zeta = {}
    for k in columns:
        zeta[k], per = atomic_fcs(system, k, omega, convention)
        rows.append(per)
    return AfcsResult(zeta, np.vstack(rows) if rows else np.empty((0, omega.W)), convention)


def filtering_cs(
    system: NormalizedSystem,
    band: BandIndexSet | None,
    omega: TestMatrix,
    convention: str = ABSOLUTE,
) -> float:
    """xi = max of zeta_k over the wanted-band columns."""
    band = band if band is not None else system.band
    if band is None:
        raise InvalidArgumentError("no band given and the system carries none")
    return max(afcs(system, band.indices, omega, convention).zeta.values())

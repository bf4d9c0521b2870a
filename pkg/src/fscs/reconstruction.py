"""LASSO reconstruction of the sparse vector and band-limited signal recovery.

Objective (``k`` is the fidelity weight)::

    F(v) = ||v||_1 + k ||y - Theta v||_2^2

The solver runs monotone FISTA (proximal gradient with soft thresholding) and
periodically polishes the iterate with an active-set pass on its sign pattern.
A solution is returned only once its subgradient residual is below ``tol``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ._errors import InvalidArgumentError, NonConvergenceError
from .acquisition import NormalizedSystem
from .dictionary import BandIndexSet, Dictionary

log = logging.getLogger(__name__)

SNR_CAP_DB = 300.0


@dataclass(frozen=True)
class LassoConfig:
    k_reg: float = 1e4
    max_iters: int = 50_000
    tol: float = 1e-8
    # None: plain monotone FISTA, no active-set polishing
    polish_every: int | None = 25

    def __post_init__(self):
        if not (self.k_reg > 0 and self.tol > 0):
            raise InvalidArgumentError("k_reg and tol must be positive")
        if self.max_iters < 1 or (self.polish_every is not None and self.polish_every < 1):
            raise InvalidArgumentError("max_iters and polish_every must be >= 1")


@dataclass(frozen=True, eq=False)
class SparseSolution:
    v_hat: np.ndarray = field(repr=False)
    objective: float
    kkt_residual: float
    iterations: int


def _matrix(theta):
    return theta.theta if isinstance(theta, NormalizedSystem) else np.asarray(theta, dtype=float)


def soft_threshold(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def lasso_objective(theta, y, v, k_reg: float) -> float:
    r = _matrix(theta) @ v - y
    return float(np.abs(v).sum() + k_reg * (r @ r))


def _kkt_from_gradient(g, v):
    on = v != 0
    viol = np.where(on, np.abs(g + np.sign(v)), np.maximum(np.abs(g) - 1.0, 0.0))
    return float(viol.max()) if viol.size else 0.0


def kkt_residual(theta, y, v, k_reg: float) -> float:
    """Largest violation of the subgradient optimality conditions.

    With ``g = 2k Theta^T (Theta v - y)``: ``|g_i + sign(v_i)|`` on the support,
    ``max(|g_i| - 1, 0)`` off it.
    """
    A = _matrix(theta)
    v = np.asarray(v, dtype=float)
    if A.shape != (len(y), len(v)):
        raise InvalidArgumentError(f"shape mismatch: Theta {A.shape}, y {len(y)}, v {len(v)}")
    g = 2.0 * k_reg * (A.T @ (A @ v - y))
    return _kkt_from_gradient(g, v)


class _Quadratic:
    """F and its smooth gradient for a fixed system and data vector."""

    def __init__(self, A, y, k_reg):
        self.A, self.y = A, y
        self.G = A.T @ A
        self.b = A.T @ y
        self.c = float(y @ y)
        self.k = k_reg

    def objective(self, v):
        # explicit residual: the Gram expansion cancels badly near the optimum
        r = self.A @ v - self.y
        return float(np.abs(v).sum() + self.k * (r @ r))

    def gradient(self, v):
        return 2.0 * self.k * (self.G @ v - self.b)


def _face_step(G_s, rhs, v_s, s, leak_tol):
    """One move on the face {sign(v_S) = s}, where F is quadratic in v_S.

    Returns ``(new_v_s, dropped)``; ``dropped`` is the local index of a
    coordinate that reached zero, or None when the face minimizer was reached.
    Returns None if no decrease is possible on this face.  ``leak_tol`` bounds
    the part of ``rhs`` outside range(G_s) that may be ignored.
    """
    w, V = np.linalg.eigh(G_s)
    keep = w > max(w.max(), 0.0) * 1e-12
    Vk, N0 = V[:, keep], V[:, ~keep]
    if not N0.shape[1] or np.abs(N0.T @ rhs).max() <= leak_tol:
        target = Vk @ ((Vk.T @ rhs) / w[keep])
        wrong = s * target <= 0
        if not wrong.any():
            return target, None
        d = target - v_s
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(wrong, np.where(d != 0, -v_s / d, 0.0), np.inf)
        i = int(np.argmin(frac))
        new = v_s + frac[i] * d
        new[i] = 0.0
        return new, i
    # rhs outside range(G_s): F is unbounded-linear along null(G_s); follow the
    # l1-decreasing null direction until a coordinate hits zero.
    d = -(N0 @ (N0.T @ s))
    shrinking = s * d < 0
    if not shrinking.any():
        return None
    frac = np.where(shrinking, -v_s / np.where(shrinking, d, 1.0), np.inf)
    i = int(np.argmin(frac))
    new = v_s + frac[i] * d
    new[i] = 0.0
    return new, i


def _active_set_polish(quad: _Quadratic, v, tol, max_steps):
    """Sign-pattern active-set refinement (feature-sign style) starting from ``v``."""
    v = v.copy()
    signs = np.sign(v)
    active = v != 0
    k2 = 2.0 * quad.k
    for _ in range(max_steps):
        if active.any():
            idx = np.flatnonzero(active)
            s = signs[idx]
            step = _face_step(
                quad.G[np.ix_(idx, idx)], quad.b[idx] - s / k2, v[idx], s, 0.1 * tol / k2
            )
            if step is None:
                return v
            v[idx], dropped = step
            if dropped is not None:
                j = idx[dropped]
                v[j] = 0.0
                active[j] = False
                signs[j] = 0.0
                continue
        g = quad.gradient(v)
        viol = np.where(active, -np.inf, np.abs(g) - 1.0)
        j = int(np.argmax(viol))
        if viol[j] <= tol:
            return v
        active[j] = True
        signs[j] = -np.sign(g[j])
    return v


def solve_lasso(theta, y, config: LassoConfig | None = None, check_monotone: bool = False):
    """Minimize ``||v||_1 + k ||y - Theta v||^2`` to a certified KKT residual.

    Raises NonConvergenceError (carrying the best iterate) if ``max_iters``
    FISTA iterations pass without certification.  With ``check_monotone`` the
    objective of the accepted iterates is checked never to increase.
    """
    config = config or LassoConfig()
    A = _matrix(theta)
    y = np.asarray(y, dtype=float)
    if A.shape[0] != y.shape[0]:
        raise InvalidArgumentError(f"Theta has {A.shape[0]} rows, y has {y.shape[0]}")
    k, tol = config.k_reg, config.tol
    n = A.shape[1]
    quad = _Quadratic(A, y, k)
    max_steps = 4 * n + 16

    def certified(v):
        return kkt_residual(A, y, v, k) <= tol

    def done(v, it):
        return SparseSolution(v, lasso_objective(A, y, v, k), kkt_residual(A, y, v, k), it)

    v = np.zeros(n)
    if certified(v):
        return done(v, 0)

    F = quad.objective(v)
    history = [F]

    def accept(value):
        if check_monotone and value > history[-1] + 1e-12 * (1.0 + abs(history[-1])):
            raise AssertionError(f"objective increased: {history[-1]!r} -> {value!r}")
        history.append(value)

    L = 2.0 * k * np.linalg.eigvalsh(quad.G)[-1]
    z = v.copy()
    t = 1.0
    for it in range(config.max_iters + 1):
        if config.polish_every and it % config.polish_every == 0:
            w = _active_set_polish(quad, v, tol, max_steps)
            Fw = quad.objective(w)
            if certified(w):
                accept(Fw)
                return done(w, it)
            if Fw <= F:
                accept(Fw)
                v, F, z, t = w, Fw, w.copy(), 1.0
        if it == config.max_iters:
            break
        if not config.polish_every and it % 50 == 0 and certified(v):
            return done(v, it)
        u = soft_threshold(z - quad.gradient(z) / L, 1.0 / L)
        Fu = quad.objective(u)
        if Fu <= F:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            z = u + ((t - 1.0) / t_next) * (u - v)
            accept(Fu)
            v, F, t = u, Fu, t_next
        else:
            # restart with a plain proximal step from v; with step 1/L it cannot
            # increase F, and it keeps moving once F stops resolving the decrease
            v = soft_threshold(v - quad.gradient(v) / L, 1.0 / L)
            F = quad.objective(v)
            accept(F)
            z, t = v.copy(), 1.0
    residual = kkt_residual(A, y, v, k)
    log.debug("lasso: no certificate after %d iterations, residual %.3e", config.max_iters, residual)
    raise NonConvergenceError(v, residual, config.max_iters)


def reconstruct_band(
    dictionary: Dictionary, band: BandIndexSet, solution, column_norms
) -> np.ndarray:
    """Wanted-band signal from the band coefficients, mapped back to raw atoms.

    ``solution`` is a SparseSolution or a coefficient vector in the normalized
    system's coordinates; dividing by ``column_norms`` undoes the normalization.
    """
    v = solution.v_hat if isinstance(solution, SparseSolution) else np.asarray(solution, float)
    idx = band.zero_based
    coeffs = v[idx] / np.asarray(column_norms)[idx]
    return dictionary.matrix[:, idx] @ coeffs


def snr_db(reference, estimate) -> float:
    """10 log10(||ref||^2 / ||ref - est||^2), capped at +300 dB."""
    reference = np.asarray(reference, dtype=float)
    estimate = np.asarray(estimate, dtype=float)
    if reference.shape != estimate.shape:
        raise InvalidArgumentError("reference and estimate lengths differ")
    ref_norm = np.linalg.norm(reference)
    if ref_norm == 0:
        raise InvalidArgumentError("reference signal is all zeros")
    err = np.linalg.norm(reference - estimate)
    if err < 1e-15 * ref_norm:
        return SNR_CAP_DB
    return float(20.0 * np.log10(ref_norm / err))

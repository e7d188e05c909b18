"""
Closed-loop simulation of filtered gradient methods on time-varying
quadratics ``f_k(x) = 1/2 x^T A x + b_k^T x``.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlreadyConvergedError,
    DimensionMismatchError,
    DimTooSmallError,
    SignalTooShortError,
    TooFewPointsError,
    check_interval,
)
from .filters import gradient_descent_filter, realize
from .model import optimal_trajectory

__all__ = [
    "QuadraticProblem", "SimTrace", "make_problem", "simulate",
    "empirical_rate", "above_floor", "internal_model_violation_demo",
    "write_trace_csv",
]

FLOOR = 1e-13


@dataclass(frozen=True)
class QuadraticProblem:
    eigvals: np.ndarray
    basis: np.ndarray
    mu: float
    L: float

    @property
    def dim(self):
        return self.eigvals.size

    @property
    def A(self):
        return (self.basis * self.eigvals) @ self.basis.T

    @property
    def kappa(self):
        return self.L / self.mu


@dataclass(frozen=True)
class SimTrace:
    x: np.ndarray
    x_star: np.ndarray
    grad_norm: np.ndarray
    err: np.ndarray

    @property
    def K(self):
        return self.err.size


def make_problem(seed, dim, mu, L, placement="endpoints_pinned"):
    """
    Random problem with eigenvalues in ``[mu, L]``.

    The basis is the Q factor of a seeded standard-normal matrix (columns
    sign-normalized so the R diagonal is positive). Eigenvalues are drawn
    uniformly and sorted; with ``placement="endpoints_pinned"`` the smallest
    and largest are then set to exactly ``mu`` and ``L``.
    """
    check_interval(mu, L)
    if dim < 2:
        raise DimTooSmallError("dim must be at least 2")
    if placement not in ("endpoints_pinned", "uniform"):
        raise ValueError(f"unknown placement {placement!r}")
    rng = np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((dim, dim)))
    Q = Q * np.sign(np.diag(R))
    eig = np.sort(rng.uniform(mu, L, dim))
    if placement == "endpoints_pinned":
        eig[0], eig[-1] = mu, L
    return QuadraticProblem(eig, Q, float(mu), float(L))


def simulate(problem, filt, signal, K):
    """
    Run ``x_{k+1} = filter(g_k)`` with ``g_k = A x_k + b_k`` from zero state.

    Returns a :class:`SimTrace` with ``K`` entries, ``k = 0, ..., K-1``.
    """
    b = signal.b
    if b.shape[0] < K:
        raise SignalTooShortError(f"signal has {b.shape[0]} steps, need {K}")
    if b.shape[1] != problem.dim:
        raise DimensionMismatchError(
            f"signal dim {b.shape[1]} != problem dim {problem.dim}")
    A = problem.A
    x_star = optimal_trajectory(problem.eigvals, problem.basis, b[:K])
    real = realize(filt, problem.dim)
    xs = np.empty((K, problem.dim))
    gn = np.empty(K)
    x = real.output()
    for k in range(K):
        g = A @ x + b[k]
        xs[k] = x
        gn[k] = np.linalg.norm(g)
        x = real.step(g)
    err = np.linalg.norm(xs - x_star, axis=1)
    return SimTrace(xs, x_star, gn, err)


def empirical_rate(trace, tail_fraction=0.5, floor=FLOOR):
    """
    Estimate the convergence rate from a tracking-error sequence.

    Samples with ``err > floor * scale`` are kept, where ``scale`` is
    ``err[0]`` or, for a :class:`SimTrace`, the larger of ``err[0]`` and
    ``max_k ||x_k*||`` (round-off grows with the size of the optimizer, not
    with the initial error). A least-squares line is fitted to ``log(err)``
    over the last ``tail_fraction`` of the kept samples and ``exp(slope)``
    is returned.

    Raises
    ------
    AlreadyConvergedError
        If no more than one sample lies above the floor.
    TooFewPointsError
        If fewer than 20 samples lie above the floor.
    """
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must be in (0, 1]")
    err = trace.err if isinstance(trace, SimTrace) else np.asarray(trace, float)
    idx = above_floor(trace, floor)
    if idx.size <= 1:
        raise AlreadyConvergedError("tracking error is already at the floor")
    if idx.size < 20:
        raise TooFewPointsError(f"only {idx.size} samples above the floor")
    tail = idx[int(np.floor(idx.size * (1 - tail_fraction))):]
    slope = np.polyfit(tail, np.log(err[tail]), 1)[0]
    return float(np.exp(slope))


def above_floor(trace, floor=FLOOR):
    """Indices of error samples above the round-off floor."""
    if isinstance(trace, SimTrace):
        err = trace.err
        scale = max(err[0], np.linalg.norm(trace.x_star, axis=1).max())
    else:
        err = np.asarray(trace, float)
        scale = err[0]
    if not scale > 0:
        return np.array([], dtype=int)
    return np.nonzero(err > floor * scale)[0]


def internal_model_violation_demo(problem, signal, K, alpha=None):
    """Track ``signal`` with plain gradient descent, ignoring its model.

    Unless the signal is constant, the filter lacks the signal's poles and
    the error settles into a persistent oscillation instead of vanishing.
    """
    if alpha is None:
        alpha = 2.0 / (problem.L + problem.mu)
    return simulate(problem, gradient_descent_filter(alpha), signal, K)


def write_trace_csv(trace, path, full_state=False):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["k", "grad_norm", "err"]
        d = trace.x.shape[1]
        if full_state:
            header += [f"x_{i}" for i in range(d)] + [f"xstar_{i}" for i in range(d)]
        w.writerow(header)
        for k in range(trace.K):
            row = [k, f"{trace.grad_norm[k]:.17g}", f"{trace.err[k]:.17g}"]
            if full_state:
                row += [f"{v:.17g}" for v in trace.x[k]]
                row += [f"{v:.17g}" for v in trace.x_star[k]]
            w.writerow(row)

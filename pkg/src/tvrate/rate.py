"""
Worst-case convergence rates of minimal-order filters.

For an eigenvalue ``lambda`` of ``A`` the modal closed loop has
characteristic polynomial ``p_lambda(z) = m(z) - lambda d(z)``; its largest
root modulus is the convergence rate of that mode. The worst case over
``lambda in [mu, L]`` is the rate of the filter on the whole problem class,
and no choice of ``d`` can push it below ``((kappa-1)/(kappa+1))**(1/n)``.
"""

import csv
import logging
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.optimize import minimize

from .errors import BadKappaError, UnsupportedModelError, check_interval
from .filters import MinimalFilter, design_for_model
from .polynomial import Polynomial, companion, poly_roots

__all__ = [
    "LocusPoint", "RateReport", "BoundReport", "closed_loop_poly",
    "root_locus", "worst_case_rate", "rho_tv", "nonminimal_reference",
    "coefficient_lower_bound", "minmax_search", "golden_section_max",
    "write_locus_csv", "rate_report_to_dict", "bound_report_to_dict",
]

log = logging.getLogger(__name__)

DEFAULT_GRID = 2001
NEAR_MAX = 1e-6
REFINE_WIDTH = 1e-10


@dataclass(frozen=True)
class LocusPoint:
    lam: float
    roots: np.ndarray
    max_modulus: float


@dataclass
class RateReport:
    rho_worst: float
    lambda_star: float
    locus: list = field(repr=False)
    grid_size: int
    refined: bool


@dataclass
class BoundReport:
    rho_tv: float
    per_k_bounds: list
    rho_general: float
    nonminimal_reference: float


def closed_loop_poly(filt, lam):
    """Monic characteristic polynomial ``m(z) - lam * d(z)``."""
    c = filt.model.m.coeffs.copy()
    c[:filt.n] -= lam * filt.d
    return Polynomial(c)


def _closed_loop_tails(filt, lams):
    m = filt.model.m.coeffs
    return m[None, :filt.n] - np.asarray(lams, dtype=float)[:, None] * filt.d[None, :]


def locus_roots(filt, lams):
    """Closed-loop roots for each gain in ``lams``, shape (len(lams), n)."""
    return np.linalg.eigvals(companion(_closed_loop_tails(filt, lams)))


def max_moduli(filt, lams):
    return np.abs(locus_roots(filt, lams)).max(axis=1)


def _mode_rate(filt, lam):
    return float(np.abs(poly_roots(closed_loop_poly(filt, lam), check=False)).max())


def root_locus(filt, mu, L, grid_size=DEFAULT_GRID, n_start=0):
    """
    Sample the root locus on ``grid_size`` uniformly spaced gains in
    ``[mu, L]`` (endpoints included).

    ``n_start > 0`` prepends that many uniformly spaced gains on ``[0, mu)``,
    which shows the locus leaving the open-loop poles.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    lams = np.linspace(mu, L, grid_size)
    if n_start > 0:
        lams = np.concatenate((np.linspace(0.0, mu, n_start, endpoint=False), lams))
    roots = locus_roots(filt, lams)
    mods = np.abs(roots).max(axis=1)
    return [LocusPoint(float(l), r, float(v)) for l, r, v in zip(lams, roots, mods)]


def golden_section_max(f, a, b, width=REFINE_WIDTH):
    """Maximize scalar ``f`` on ``[a, b]`` by golden-section search.

    Returns ``(x, f(x))`` for the best point evaluated, endpoints included.
    """
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    best = max(((a, f(a)), (b, f(b))), key=lambda t: t[1])
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > width:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    for cand in ((c, fc), (d, fd)):
        if cand[1] > best[1]:
            best = cand
    return best


def worst_case_rate(filt, mu, L, grid_size=DEFAULT_GRID, refine=True):
    """
    Worst-case rate ``max_{lambda in [mu, L]}`` of the largest closed-loop
    root modulus.

    Parameters
    ----------
    filt : MinimalFilter
    mu, L : float
        Eigenvalue interval, ``0 < mu < L``.
    grid_size : int, optional
        Number of uniformly spaced gains evaluated first.
    refine : bool, optional
        If true, every local maximum of the grid values lying within
        ``NEAR_MAX`` of the grid maximum is refined by golden-section search
        on its two neighbouring grid cells, down to width ``REFINE_WIDTH``.

    Returns
    -------
    RateReport
    """
    check_interval(mu, L)
    locus = root_locus(filt, mu, L, grid_size)
    lams = np.array([p.lam for p in locus])
    vals = np.array([p.max_modulus for p in locus])
    i_best = int(np.argmax(vals))
    rho, lam_star = float(vals[i_best]), float(lams[i_best])
    if refine:
        padded = np.concatenate(([-np.inf], vals, [-np.inf]))
        local = (vals >= padded[:-2]) & (vals >= padded[2:])
        for i in np.nonzero(local & (vals >= rho - NEAR_MAX))[0]:
            lo, hi = lams[max(i - 1, 0)], lams[min(i + 1, grid_size - 1)]
            lam, val = golden_section_max(lambda x: _mode_rate(filt, x), lo, hi)
            if val > rho:
                rho, lam_star = float(val), float(lam)
    return RateReport(rho, lam_star, locus, grid_size, refine)


def _check_kappa(kappa):
    if not kappa > 1:
        raise BadKappaError(f"kappa must exceed 1, got {kappa}")


def rho_tv(kappa, n):
    """Rate floor ``((kappa - 1) / (kappa + 1))**(1/n)`` of minimal filters."""
    _check_kappa(kappa)
    if n < 1:
        raise ValueError("model degree must be at least 1")
    return ((kappa - 1.0) / (kappa + 1.0)) ** (1.0 / n)


def nonminimal_reference(kappa, n):
    """Literature bound for non-minimal (accelerated) filters on ``(z-1)^n``.

    Reported for comparison only; nothing in this package attains it.
    """
    _check_kappa(kappa)
    s = np.sqrt(kappa)
    return float(((s - 1.0) / (s + 1.0)) ** (1.0 / n))


def coefficient_lower_bound(model, kappa):
    """Per-coefficient rate bounds from the model coefficients.

    For ``k = 1..n`` the bound is
    ``(|m_{n-k}| / C(n, k) * (kappa - 1) / (kappa + 1))**(1/k)``; the
    ``k = n`` term equals :func:`rho_tv` because ``|m_0| = 1``.
    """
    _check_kappa(kappa)
    n = model.n
    m = model.m.coeffs
    ratio = (kappa - 1.0) / (kappa + 1.0)
    per_k = [float((abs(m[n - k]) / comb(n, k) * ratio) ** (1.0 / k))
             for k in range(1, n + 1)]
    return BoundReport(rho_tv(kappa, n), per_k, max(per_k),
                       nonminimal_reference(kappa, n))


def _nelder_mead(objective, x, xatol, fatol, maxfev, max_restarts):
    """Nelder-Mead restarted from its own end point until it stops improving.

    Restarting rebuilds the simplex, which gets the method unstuck on the
    kinks of a max-type objective.
    """
    n = len(x)
    f = objective(x)
    for _ in range(max_restarts):
        res = minimize(objective, x, method="Nelder-Mead",
                       options=dict(xatol=xatol, fatol=fatol, maxfev=maxfev,
                                    maxiter=maxfev, adaptive=n > 2))
        if not res.fun < f - fatol:
            break
        x, f = res.x, res.fun
    return np.asarray(x, dtype=float), float(f)


def minmax_search(model, mu, L, n_starts=32, seed=0, search_grid=201,
                  use_closed_form=True, spread=0.5, n_polish=3):
    """
    Numerically minimize the worst-case rate over numerator coefficients.

    Every start runs a restarted Nelder-Mead at loose tolerance on the worst
    case over ``search_grid // 2 + 1`` gains. The ``n_polish`` best end points
    are then refined at tight tolerance on ``search_grid`` gains, re-scored with
    :func:`worst_case_rate` at full resolution, and the best is returned.

    Start 0 is the closed-form design when one exists (and
    ``use_closed_form`` is set), otherwise a uniform random point of scale
    ``2 / (L + mu)``; the other starts add Gaussian noise of scale
    ``spread * 2 / (L + mu)`` to it. All randomness comes from ``seed``.

    The result is the best filter found, not a certified global optimum.

    Returns
    -------
    (MinimalFilter, RateReport)
    """
    check_interval(mu, L)
    n = model.n
    rng = np.random.default_rng(seed)
    scale = 2.0 / (L + mu)
    base = None
    if use_closed_form:
        try:
            base = design_for_model(model, mu, L).d
        except UnsupportedModelError:
            pass
    if base is None:
        base = scale * rng.uniform(-1.0, 1.0, n)

    m_tail = model.m.coeffs[:n]

    def grid_objective(size):
        grid = np.linspace(mu, L, size)

        def objective(d):
            tails = m_tail[None, :] - grid[:, None] * d[None, :]
            return np.abs(np.linalg.eigvals(companion(tails))).max()
        return objective

    coarse_obj = grid_objective(search_grid // 2 + 1)
    fine_obj = grid_objective(search_grid)

    starts = [base] + [base + spread * scale * rng.standard_normal(n)
                       for _ in range(n_starts - 1)]
    coarse = []
    for s, x0 in enumerate(starts):
        x, f = _nelder_mead(coarse_obj, x0, 1e-5, 1e-9, 300 * n, 3)
        coarse.append((f, s, x))
        log.debug("start %d: coarse rate %.10f", s, f)
    coarse.sort(key=lambda t: (t[0], t[1]))

    best = None
    for _, s, x in coarse[:n_polish]:
        x, _ = _nelder_mead(fine_obj, x, 1e-12, 1e-15, 1500 * n, 10)
        filt = MinimalFilter(Polynomial(x), model, mu, L)
        report = worst_case_rate(filt, mu, L)
        if best is None or report.rho_worst < best[1].rho_worst:
            best = (filt, report)
    return best


def _sorted_roots(roots):
    roots = np.asarray(roots)
    key = np.lexsort((np.angle(roots), -np.round(np.abs(roots), 12)))
    return roots[key]


def write_locus_csv(locus, path):
    n = len(locus[0].roots)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["lambda"]
        for i in range(1, n + 1):
            header += [f"re_{i}", f"im_{i}"]
        w.writerow(header + ["max_modulus"])
        for p in locus:
            row = [f"{p.lam:.17g}"]
            for r in _sorted_roots(p.roots):
                row += [f"{r.real:.17g}", f"{r.imag:.17g}"]
            w.writerow(row + [f"{p.max_modulus:.17g}"])


def rate_report_to_dict(report, include_locus=False):
    out = {"rho_worst": report.rho_worst, "lambda_star": report.lambda_star,
           "grid_size": report.grid_size, "refined": report.refined}
    if include_locus:
        out["locus"] = [
            {"lambda": p.lam, "max_modulus": p.max_modulus,
             "roots": [[float(r.real), float(r.imag)] for r in _sorted_roots(p.roots)]}
            for p in report.locus]
    return out


def bound_report_to_dict(report):
    return {"rho_tv": report.rho_tv, "per_k_bounds": list(report.per_k_bounds),
            "rho_general": report.rho_general,
            "nonminimal_reference": report.nonminimal_reference}


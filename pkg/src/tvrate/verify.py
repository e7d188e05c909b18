"""Randomized checks that no minimal filter beats the rate floor."""

from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedModelError
from .filters import MinimalFilter, design_for_model
from .model import PoleSpec, build_model
from .polynomial import Polynomial
from .rate import coefficient_lower_bound, worst_case_rate

KAPPAS = (2.0, 10.0, 100.0)
TOL = 1e-9


def random_model(rng, max_n=4, near_degenerate=0.1):
    """Random unit-circle model of degree ``1..max_n``.

    With probability ``near_degenerate`` conjugate pairs use ``theta = 1e-2``.
    """
    n = int(rng.integers(1, max_n + 1))
    specs = []
    while sum(s.order for s in specs) < n:
        room = n - sum(s.order for s in specs)
        if room >= 2 and rng.random() < 0.6:
            theta = 1e-2 if rng.random() < near_degenerate else rng.uniform(0.05, np.pi - 0.05)
            specs.append(PoleSpec.pair(theta))
        else:
            specs.append(PoleSpec.real(1 if rng.random() < 0.5 else -1))
    return build_model(specs)


def random_filter(rng, model, mu, L):
    """Random strictly proper numerator for ``model``.

    A third of the draws perturb the closed-form optimum (when one exists),
    so the ensemble includes filters whose rate sits right at the floor.
    """
    n = model.n
    scale = 2.0 / (L + mu)
    kind = rng.integers(3)
    if kind == 0:
        try:
            base = design_for_model(model, mu, L).d
            d = base + 10.0 ** rng.uniform(-8, -2) * scale * rng.standard_normal(n)
            return MinimalFilter(Polynomial(d), model, mu, L)
        except UnsupportedModelError:
            pass
    if kind == 2:
        scale *= 10.0 ** rng.uniform(-3, 0)
    d = scale * rng.uniform(-2.0, 2.0, n)
    return MinimalFilter(Polynomial(d), model, mu, L)


@dataclass
class DominanceResult:
    trials: int = 0
    below_floor: list = field(default_factory=list)
    below_coefficient_bound: list = field(default_factory=list)
    min_gap: float = np.inf

    @property
    def passed(self):
        return not self.below_floor and not self.below_coefficient_bound


def dominance_trials(seed=0, trials=1000, max_n=4, kappas=KAPPAS, tol=TOL):
    """Check ``worst_case_rate >= rho_tv - tol`` on a random ensemble.

    Also checks the per-coefficient bound. Violations are recorded as
    ``(trial, model, numerator, rate, bound)`` tuples.
    """
    rng = np.random.default_rng(seed)
    out = DominanceResult()
    for t in range(trials):
        model = random_model(rng, max_n)
        kappa = float(kappas[rng.integers(len(kappas))])
        mu, L = 1.0, kappa
        filt = random_filter(rng, model, mu, L)
        rate = worst_case_rate(filt, mu, L).rho_worst
        bound = coefficient_lower_bound(model, kappa)
        out.trials += 1
        out.min_gap = min(out.min_gap, rate - bound.rho_tv)
        record = (t, str(model), filt.d.tolist(), rate)
        if rate < bound.rho_tv - tol:
            out.below_floor.append(record + (bound.rho_tv,))
        if rate < bound.rho_general - tol:
            out.below_coefficient_bound.append(record + (bound.rho_general,))
    return out

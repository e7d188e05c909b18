"""
Minimal-order optimization filters ``c(z) = d(z) / m(z)``.

The same scalar filter acts on every coordinate of the gradient. Its
denominator is the model of time variation, which is what lets the loop
track the moving minimizer exactly; the numerator has degree below ``n``, so
the filter is strictly proper and has no direct feedthrough.
"""

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadThetaError,
    NearDegenerateModelWarning,
    TVRateError,
    UnsupportedModelError,
    WrongModelError,
    check_interval,
)
from .model import PoleSpec, TimeVariationModel, build_model
from .polynomial import Polynomial

__all__ = [
    "MinimalFilter", "FilterRealization", "gradient_descent_filter",
    "design_n1", "design_n2_conjugate", "design_n2_real", "design_n3",
    "design_for_model", "realize", "filter_to_dict", "filter_from_dict",
    "save_filter", "load_filter",
]

DEGENERATE_THETA = 1e-3


@dataclass(frozen=True)
class MinimalFilter:
    """Numerator ``d_poly`` over the model polynomial.

    ``mu`` and ``L`` record the eigenvalue interval a design was made for;
    they are informational and may be ``None``.
    """

    d_poly: Polynomial
    model: TimeVariationModel
    mu: float = None
    L: float = None

    def __post_init__(self):
        if not isinstance(self.d_poly, Polynomial):
            object.__setattr__(self, "d_poly", Polynomial(self.d_poly))
        if not self.d_poly.is_zero() and self.d_poly.degree >= self.model.n:
            raise TVRateError(
                f"numerator degree {self.d_poly.degree} must be below model "
                f"degree {self.model.n} (strictly proper filter)")

    @property
    def n(self):
        return self.model.n

    @property
    def m_poly(self):
        return self.model.m

    @property
    def d(self):
        """Numerator coefficients ``d_0, ..., d_{n-1}`` (zero padded)."""
        return self.d_poly.padded(self.n)[:self.n]


def _alpha(mu, L):
    return 2.0 / (L + mu)


def gradient_descent_filter(alpha, model=None):
    """Gradient descent ``x_{k+1} = x_k - alpha g_k`` as ``-alpha / (z - 1)``."""
    if model is None:
        model = build_model([PoleSpec.real(1)])
    if not model.m.allclose([-1.0, 1.0], atol=0):
        raise WrongModelError("gradient descent needs the model m(z) = z - 1")
    if alpha <= 0:
        raise TVRateError("step size must be positive")
    return MinimalFilter(Polynomial([-alpha]), model)


def design_n1(model, mu, L):
    """Optimal first-order filter for ``m(z) = z - 1`` or ``m(z) = z + 1``.

    The numerator is ``-alpha`` or ``+alpha`` with ``alpha = 2 / (L + mu)``;
    both reach a worst-case rate of ``(kappa - 1) / (kappa + 1)``.
    """
    check_interval(mu, L)
    if model.n != 1:
        raise WrongModelError(f"expected a degree-1 model, got degree {model.n}")
    sign = -1.0 if model.m.coeffs[0] < 0 else 1.0
    return MinimalFilter(Polynomial([sign * _alpha(mu, L)]), model, mu, L)


def design_n2_conjugate(theta, mu, L):
    r"""
    Optimal filter for a single conjugate pair ``exp(+-i theta)``.

    .. math:: c(z) = \frac{c_1 z - c_2}{z^2 - 2\cos\theta\, z + 1},
              \quad c_1 = -\frac{2\cos\theta}{L},
              \quad c_2 = -\frac{2}{L + \mu}

    At ``lambda = L`` the closed loop reduces to ``z^2 - rho^2`` with
    ``rho^2 = (L - mu) / (L + mu)``.
    """
    check_interval(mu, L)
    model = build_model([PoleSpec.pair(theta)])
    c1 = -2.0 * np.cos(theta) / L
    c2 = -_alpha(mu, L)
    return MinimalFilter(Polynomial([-c2, c1]), model, mu, L)


def design_n2_real(mu, L):
    """Optimal filter for ``m(z) = z^2 - 1``: numerator ``-2 / (L + mu)``."""
    check_interval(mu, L)
    model = build_model([PoleSpec.real(1), PoleSpec.real(-1)])
    c1, c2 = 0.0, _alpha(mu, L)
    return MinimalFilter(Polynomial([-c2, c1]), model, mu, L)


def design_n3(theta, mu, L):
    """
    Optimal filter for ``m(z) = (z - 1)(z^2 - 2 cos(theta) z + 1)``.

    Numerator ``c_2 z^2 + c_1 z + c_0`` with coefficients in closed form in
    ``mu``, ``L``, ``cos(theta)`` and the target rate
    ``rho = ((kappa - 1) / (kappa + 1))**(1/3)``.

    Warns with :class:`NearDegenerateModelWarning` when ``theta < 1e-3``,
    where the pair nearly merges with the pole at one.
    """
    check_interval(mu, L)
    if not 0.0 < theta < np.pi:
        raise BadThetaError(f"theta must lie in (0, pi), got {theta}")
    if theta < DEGENERATE_THETA:
        warnings.warn(f"theta={theta} is close to the pole at z=1",
                      NearDegenerateModelWarning, stacklevel=2)
    model = build_model([PoleSpec.real(1), PoleSpec.pair(theta)])
    kappa = L / mu
    rho = ((kappa - 1.0) / (kappa + 1.0)) ** (1.0 / 3.0)
    cos = np.cos(theta)
    c0 = (-1.0 + rho**3) / mu
    c1 = ((-L + mu + (L + mu) * rho) * (1 + rho**2)
          + 2 * rho * (L + mu - rho * (L - mu)) * cos) / (2 * mu * L * rho)
    c2 = -((-L + mu + (L + mu) * rho**2) * (1 + rho)
           + 2 * rho * (-L + mu + (L + mu) * rho) * cos) / (2 * mu * L * rho**2)
    return MinimalFilter(Polynomial([c0, c1, c2]), model, mu, L)


def closed_form_family(model):
    """Name of the closed-form design that applies to ``model``, or ``None``."""
    specs = sorted(model.specs, key=lambda s: (s.kind, -s.sign, s.theta))
    if any(s.multiplicity != 1 for s in specs):
        return None
    kinds = [(s.kind, s.sign) for s in specs]
    if kinds in ([("real", 1)], [("real", -1)]):
        return "n1"
    if kinds == [("pair", 0)]:
        return "n2_conjugate"
    if kinds == [("real", 1), ("real", -1)]:
        return "n2_real"
    if kinds == [("pair", 0), ("real", 1)]:
        return "n3"
    return None


def design_for_model(model, mu, L):
    """Dispatch to the closed-form design matching the shape of ``model``."""
    family = closed_form_family(model)
    theta = next((s.theta for s in model.specs if s.kind == "pair"), None)
    if family == "n1":
        return design_n1(model, mu, L)
    if family == "n2_conjugate":
        return design_n2_conjugate(theta, mu, L)
    if family == "n2_real":
        return design_n2_real(mu, L)
    if family == "n3":
        return design_n3(theta, mu, L)
    raise UnsupportedModelError(
        f"no closed-form design for model [{model}]; use the search command")


class FilterRealization:
    """
    Observable canonical realization of ``d(z) / m(z)``, one copy per
    coordinate, with zero initial state.

    ``step(g)`` consumes the gradient ``g_k`` and returns ``x_{k+1}``; the
    output ``x_k`` therefore depends on gradients up to ``g_{k-1}`` only.
    The states are partial sums of ``m_i x`` and ``d_i g`` terms, so they
    stay on the scale of the iterates even when ``d(1)`` is tiny.
    """

    def __init__(self, filt, dim):
        n = filt.n
        m = filt.model.m.coeffs
        self.state_dim = n
        self.dim = dim
        self.A_f = np.zeros((n, n))
        if n > 1:
            self.A_f[np.arange(1, n), np.arange(n - 1)] = 1.0
        self.A_f[:, -1] = -m[:n]
        self.B_f = filt.d.copy()
        self.C_f = np.zeros(n)
        self.C_f[-1] = 1.0
        self.state = np.zeros((dim, n))

    def output(self):
        return self.state @ self.C_f

    def step(self, g):
        g = np.asarray(g, dtype=float)
        self.state = self.state @ self.A_f.T + np.outer(g, self.B_f)
        return self.state @ self.C_f

    def reset(self):
        self.state = np.zeros((self.dim, self.state_dim))


def realize(filt, dim=1):
    return FilterRealization(filt, dim)


def filter_to_dict(filt):
    out = {"model": filt.model.m.tolist(), "numerator": filt.d.tolist()}
    out["mu"] = filt.mu
    out["L"] = filt.L
    return out


def filter_from_dict(data):
    model = TimeVariationModel.from_coeffs(data["model"])
    return MinimalFilter(Polynomial(data["numerator"]), model,
                         data.get("mu"), data.get("L"))


def save_filter(filt, path):
    with open(path, "w") as fh:
        json.dump(filter_to_dict(filt), fh, indent=2)


def load_filter(path):
    with open(path) as fh:
        return filter_from_dict(json.load(fh))

"""
Models of time variation.

A model is a monic polynomial ``m(z)`` whose roots all lie on the unit
circle. It is specified by a list of :class:`PoleSpec` entries (real poles at
``+1``/``-1`` and conjugate pairs ``exp(+-i theta)``) and generates the
linear term ``b_k`` of the objective through the homogeneous recurrence

    b_{k+n} = -sum_{i<n} m_i b_{k+i}.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadThetaError,
    DimensionMismatchError,
    EmptySpecError,
    KTooShortError,
    SingularAError,
    TVRateError,
)
from .polynomial import Polynomial, poly_from_roots, poly_roots

__all__ = [
    "PoleSpec", "TimeVariationModel", "SignalTrace", "build_model",
    "parse_poles", "generate_signal", "optimal_trajectory", "write_signal_csv",
]


@dataclass(frozen=True)
class PoleSpec:
    """A real pole at ``sign`` or a conjugate pair at angle ``theta``."""

    kind: str
    sign: int = 0
    theta: float = 0.0
    multiplicity: int = 1

    def __post_init__(self):
        if self.kind == "real":
            if self.sign not in (1, -1):
                raise TVRateError(f"real pole sign must be +1 or -1, got {self.sign}")
        elif self.kind == "pair":
            if not 0.0 < self.theta < np.pi:
                raise BadThetaError(f"theta must lie in (0, pi), got {self.theta}")
        else:
            raise TVRateError(f"unknown pole kind {self.kind!r}")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise TVRateError("multiplicity must be a positive integer")

    @classmethod
    def real(cls, sign, multiplicity=1):
        return cls("real", sign=int(sign), multiplicity=multiplicity)

    @classmethod
    def pair(cls, theta, multiplicity=1):
        return cls("pair", theta=float(theta), multiplicity=multiplicity)

    @property
    def order(self):
        return self.multiplicity * (1 if self.kind == "real" else 2)

    def roots(self):
        if self.kind == "real":
            r = [complex(self.sign)]
        else:
            w = np.exp(1j * self.theta)
            r = [w, w.conjugate()]
        return r * self.multiplicity

    def __str__(self):
        base = f"{self.sign:+d}" if self.kind == "real" else f"pair:{self.theta!r}"
        return ",".join([base] * self.multiplicity)


@dataclass(frozen=True)
class TimeVariationModel:
    specs: tuple
    m: Polynomial = field(compare=False)

    @property
    def n(self):
        return self.m.degree

    def roots(self):
        """Exact root multiset (unit modulus by construction)."""
        return np.array([r for s in self.specs for r in s.roots()])

    @property
    def coeffs(self):
        return self.m.coeffs

    def __str__(self):
        return ",".join(str(s) for s in self.specs)

    @classmethod
    def from_coeffs(cls, coeffs, tol=1e-6):
        """Recover pole specs from monic coefficients ``[m_0, ..., 1]``.

        Raises :class:`TVRateError` if the roots are not on the unit circle or
        the rebuilt model does not reproduce ``coeffs``.
        """
        p = Polynomial(coeffs)
        if p.degree < 1 or abs(p.leading - 1.0) > 1e-12:
            raise TVRateError("model polynomial must be monic of degree >= 1")
        p = Polynomial(np.append(p.coeffs[:-1], 1.0))
        roots = poly_roots(p, check=False)
        # repeated roots are only accurate to ~eps**(1/mult)
        if np.any(np.abs(np.abs(roots) - 1.0) > 1e-4):
            raise TVRateError("model roots must lie on the unit circle")
        specs = []
        for r in roots:
            if abs(r.imag) < tol and abs(abs(r.real) - 1.0) < 1e-4:
                specs.append(PoleSpec.real(1 if r.real > 0 else -1))
            elif r.imag > 0:
                specs.append(PoleSpec.pair(float(np.angle(r))))
        model = build_model(specs)
        if not model.m.allclose(p, atol=1e-9):
            raise TVRateError(f"could not classify model roots {roots}")
        # keep the caller's coefficients so the filter denominator is exact
        return cls(model.specs, p)


def parse_poles(text):
    """Parse ``"+1,-1,pair:0.785"`` into a list of :class:`PoleSpec`.

    Multiplicity is expressed by repetition.
    """
    specs = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        if tok.startswith("pair:"):
            specs.append(PoleSpec.pair(float(tok[5:])))
        elif tok in ("+1", "1", "-1"):
            specs.append(PoleSpec.real(int(tok)))
        else:
            raise TVRateError(f"cannot parse pole {tok!r}")
    return specs


def build_model(specs):
    """Build the monic model ``m(z)`` from a sequence of :class:`PoleSpec`."""
    specs = tuple(specs)
    if not specs:
        raise EmptySpecError("a model needs at least one pole")
    roots = [r for s in specs for r in s.roots()]
    m = poly_from_roots(roots)
    # constant term is a product of unit-modulus roots
    assert abs(abs(m.coeffs[0]) - 1.0) < 1e-9
    return TimeVariationModel(specs, m)


@dataclass(frozen=True)
class SignalTrace:
    """Sequence ``b`` of shape (K, dim) generated by ``model``."""

    b: np.ndarray
    seed: int
    model: TimeVariationModel

    @property
    def K(self):
        return self.b.shape[0]

    @property
    def dim(self):
        return self.b.shape[1]


def extend_recurrence(m, initial, K):
    """Extend initial values (shape (n, dim)) to K steps of the recurrence."""
    m = m.coeffs if isinstance(m, Polynomial) else np.asarray(m)
    n = m.size - 1
    initial = np.atleast_2d(np.asarray(initial, dtype=float))
    if initial.shape[0] != n:
        initial = initial.T
    b = np.empty((K, initial.shape[1]))
    b[:n] = initial[:K]
    neg = -m[:n]
    for k in range(n, K):
        b[k] = neg @ b[k - n:k]
    return b


def generate_signal(model, dim, K, seed=0, amplitude=1.0, initial=None):
    """
    Generate ``b_k`` for ``k = 0, ..., K-1`` from ``model``.

    Parameters
    ----------
    model : TimeVariationModel
    dim : int
        Dimension of each ``b_k``.
    K : int
        Number of steps; must exceed the model degree.
    seed : int
        Master seed. Coordinate ``i`` draws its initial values from the
        ``i``-th child of ``numpy.random.SeedSequence(seed)``.
    amplitude : float
        Initial values are uniform on ``[-amplitude, amplitude]``.
    initial : array_like, optional
        Explicit initial values, shape (n, dim); overrides the random draw.

    Returns
    -------
    SignalTrace
    """
    n = model.n
    if K <= n:
        raise KTooShortError(f"K={K} must exceed model degree {n}")
    if dim < 1 or amplitude <= 0:
        raise TVRateError("need dim >= 1 and amplitude > 0")
    if initial is None:
        children = np.random.SeedSequence(seed).spawn(dim)
        initial = np.column_stack([
            np.random.default_rng(ss).uniform(-amplitude, amplitude, n)
            for ss in children])
    else:
        initial = np.asarray(initial, dtype=float).reshape(n, dim)
    return SignalTrace(extend_recurrence(model.m, initial, K), seed, model)


def optimal_trajectory(eigvals, basis, signal):
    """Minimizers ``x_k* = -A^{-1} b_k`` with ``A = V diag(eigvals) V^T``."""
    eigvals = np.asarray(eigvals, dtype=float)
    V = np.asarray(basis, dtype=float)
    if np.any(eigvals <= 0):
        raise SingularAError("all eigenvalues of A must be positive")
    b = signal.b if isinstance(signal, SignalTrace) else np.atleast_2d(signal)
    if V.shape != (eigvals.size, eigvals.size) or b.shape[1] != eigvals.size:
        raise DimensionMismatchError("basis, eigenvalues and signal disagree in dimension")
    return -((b @ V) / eigvals) @ V.T


def write_signal_csv(signal, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k"] + [f"b_{i}" for i in range(signal.dim)])
        for k, row in enumerate(signal.b):
            w.writerow([k] + [f"{v:.17g}" for v in row])

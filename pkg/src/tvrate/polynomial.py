"""
Real-coefficient univariate polynomials.

Coefficients are stored in ascending degree order, so ``coeffs[i]`` is the
coefficient of ``z**i``. This is the convention used for the model ``m(z)``,
the filter numerator ``d(z)`` and the closed-loop polynomial
``m(z) - lambda * d(z)`` throughout the package.
"""

from itertools import combinations
from math import prod

import numpy as np

from .errors import (
    DegreeZeroError,
    KOutOfRangeError,
    NonConjugateClosedError,
    RootAccuracyError,
)

__all__ = [
    "Polynomial", "poly_eval", "poly_roots", "max_root_modulus",
    "elementary_symmetric", "poly_from_roots", "companion",
]

ZERO_TOL = 1e-12  # relative to the largest coefficient magnitude
CONJ_TOL = 1e-8
RESIDUAL_TOL = 1e-10


class Polynomial:
    """Polynomial with real coefficients in ascending degree order.

    Trailing coefficients whose magnitude is below ``ZERO_TOL`` times the
    largest coefficient magnitude are trimmed on construction. The zero
    polynomial is stored as ``[0.0]`` and reports degree 0.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float).ravel()
        if c.size == 0:
            c = np.zeros(1)
        scale = np.max(np.abs(c))
        if scale > 0:
            keep = np.nonzero(np.abs(c) > ZERO_TOL * scale)[0]
            c = c[:keep[-1] + 1]
        else:
            c = np.zeros(1)
        c.flags.writeable = False
        self.coeffs = c

    @classmethod
    def monomial(cls, n):
        c = np.zeros(n + 1)
        c[n] = 1.0
        return cls(c)

    @property
    def degree(self):
        return self.coeffs.size - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    @property
    def is_monic(self):
        return self.coeffs[-1] == 1.0

    def is_zero(self):
        return self.coeffs.size == 1 and self.coeffs[0] == 0.0

    def padded(self, length):
        """Coefficient array zero-padded (ascending) to ``length`` entries."""
        out = np.zeros(max(length, self.coeffs.size))
        out[:self.coeffs.size] = self.coeffs
        return out

    def __call__(self, z):
        return poly_eval(self, z)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(self.coeffs.size, other.coeffs.size)
        return Polynomial(self.padded(n) + other.padded(n))

    def __sub__(self, other):
        other = _as_poly(other)
        n = max(self.coeffs.size, other.coeffs.size)
        return Polynomial(self.padded(n) - other.padded(n))

    def __mul__(self, other):
        if np.isscalar(other):
            return Polynomial(self.coeffs * float(other))
        other = _as_poly(other)
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(-self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def allclose(self, other, atol=1e-12):
        other = _as_poly(other)
        n = max(self.coeffs.size, other.coeffs.size)
        return bool(np.allclose(self.padded(n), other.padded(n), rtol=0, atol=atol))

    def tolist(self):
        return [float(c) for c in self.coeffs]

    def __repr__(self):
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0 and self.degree > 0:
                continue
            terms.append(f"{c:+.6g}" + ("" if i == 0 else "*z" if i == 1 else f"*z^{i}"))
        return "Polynomial(" + " ".join(terms) + ")"


def _as_poly(p):
    if isinstance(p, Polynomial):
        return p
    if np.isscalar(p):
        return Polynomial([p])
    return Polynomial(p)


def poly_eval(p, z):
    """Evaluate ``p`` at ``z`` (scalar or array) by Horner's rule."""
    p = _as_poly(p)
    acc = np.zeros_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 0j
    for c in p.coeffs[::-1]:
        acc = acc * z + c
    return acc


def companion(monic_tail):
    """Companion matrices for monic polynomials.

    Parameters
    ----------
    monic_tail : array_like, shape (..., n)
        Coefficients ``c_0, ..., c_{n-1}`` of ``z^n + sum_i c_i z^i``.

    Returns
    -------
    ndarray, shape (..., n, n)
        Matrices with ones on the subdiagonal and ``-c`` in the last column,
        whose eigenvalues are the roots.
    """
    tail = np.asarray(monic_tail, dtype=float)
    n = tail.shape[-1]
    C = np.zeros(tail.shape[:-1] + (n, n))
    if n > 1:
        C[..., np.arange(1, n), np.arange(n - 1)] = 1.0
    C[..., :, n - 1] = -tail
    return C


def poly_roots(p, check=True):
    """
    All complex roots of ``p``, with multiplicity.

    Roots are the eigenvalues of the companion matrix of the monic
    normalization. When ``check`` is set, every root must satisfy the residual
    test ``|p(r)| <= RESIDUAL_TOL * ||c||_1 * max(1, |r|)**n``.

    Raises
    ------
    DegreeZeroError
        If ``p`` is constant.
    RootAccuracyError
        If a returned root fails the residual test.
    """
    p = _as_poly(p)
    if p.degree < 1:
        raise DegreeZeroError("constant polynomial has no roots")
    tail = p.coeffs[:-1] / p.leading
    roots = np.linalg.eigvals(companion(tail))
    if check:
        scale = np.abs(p.coeffs).sum() * np.maximum(np.abs(roots), 1.0) ** p.degree
        resid = np.abs(poly_eval(p, roots))
        bad = resid > RESIDUAL_TOL * scale
        if np.any(bad):
            raise RootAccuracyError(
                f"root residual {resid.max():.3e} exceeds tolerance for {p!r}")
    return roots


def max_root_modulus(p):
    return float(np.max(np.abs(poly_roots(p))))


def elementary_symmetric(roots, k):
    """Sum over all ``k``-subsets of ``roots`` of the product of the subset.

    Computed by explicit enumeration of the ``C(n, k)`` subsets, so it is only
    meant for the small root sets (n up to about 8) that occur here.
    """
    roots = [complex(r) for r in np.ravel(roots)]
    if not 1 <= k <= len(roots):
        raise KOutOfRangeError(f"k={k} outside 1..{len(roots)}")
    return sum(prod(c) for c in combinations(roots, k))


def poly_from_roots(roots):
    """
    Monic polynomial ``prod_i (z - roots[i])``.

    Raises
    ------
    NonConjugateClosedError
        If the expanded coefficients have an imaginary part larger than
        ``CONJ_TOL``, i.e. the roots are not closed under conjugation.
    """
    c = np.ones(1, dtype=complex)
    for r in np.ravel(roots):
        # multiply by (z - r) in ascending order
        c = np.concatenate(([0j], c)) - r * np.concatenate((c, [0j]))
    if np.max(np.abs(c.imag)) > CONJ_TOL:
        raise NonConjugateClosedError(
            f"imaginary coefficient residue {np.max(np.abs(c.imag)):.3e}")
    out = c.real.copy()
    out[-1] = 1.0
    return Polynomial(out)

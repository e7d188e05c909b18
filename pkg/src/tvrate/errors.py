"""Exception and warning types raised across the package."""


class TVRateError(ValueError):
    """Base class for all errors raised by :mod:`tvrate`."""


class DegreeZeroError(TVRateError):
    pass


class KOutOfRangeError(TVRateError):
    pass


class NonConjugateClosedError(TVRateError):
    pass


class RootAccuracyError(TVRateError):
    """Companion eigenvalues failed the backward residual check."""


class EmptySpecError(TVRateError):
    pass


class KTooShortError(TVRateError):
    pass


class SingularAError(TVRateError):
    pass


class WrongModelError(TVRateError):
    pass


class BadIntervalError(TVRateError):
    pass


class BadThetaError(TVRateError):
    pass


class BadKappaError(TVRateError):
    pass


class UnsupportedModelError(TVRateError):
    pass


class DimTooSmallError(TVRateError):
    pass


class DimensionMismatchError(TVRateError):
    pass


class SignalTooShortError(TVRateError):
    pass


class TooFewPointsError(TVRateError):
    pass


class AlreadyConvergedError(TVRateError):
    pass


class NearDegenerateModelWarning(UserWarning):
    """The conjugate pair is close to collapsing onto z = 1."""


def check_interval(mu, L):
    if not (0 < mu < L):
        raise BadIntervalError(f"need 0 < mu < L, got mu={mu}, L={L}")

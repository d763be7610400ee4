"""
Exception hierarchy for the simulator

Every error carries a human readable *description* and the process exit code
the command line front end should use when the error reaches it.
"""


class HybeamError(Exception):
    """
    Base class for all errors raised by hybeam.
    """

    exit_code = 1

    def __init__(self, description=None):
        self.description = description or self.__class__.__name__
        super().__init__(self.description)


class ConfigError(HybeamError):
    """
    Invalid scenario, override or settings value.
    """

    exit_code = 2


class DimensionError(ConfigError, ValueError):
    """
    Matrix, tap or system dimensions that do not fit together.
    """


class ProfileError(ConfigError, ValueError):
    """
    A power delay profile that violates its normalization.
    """


class ScenarioError(ConfigError):
    """
    A scheme or proposition that cannot be evaluated on the given scenario.
    """


class CombinerError(ConfigError):
    """
    An operation was given a combiner of the wrong kind.
    """


class PlotError(ConfigError):
    """
    A plot request that does not match the result file.
    """


class NumericalError(HybeamError):
    """
    Numerical failure inside the linear algebra.
    """

    exit_code = 3


class SpectralAliasingError(NumericalError):
    """
    Fewer subcarriers than taps: the tap sequence would alias.
    """


class NotHermitianError(NumericalError):
    pass


class IndefiniteMatrixError(NumericalError):
    pass


class EmptyProfileError(NumericalError):
    """
    A delay profile without any power.
    """


class SingularChannelError(NumericalError):
    """
    Rank deficient channel, optionally at a known subcarrier.
    """

    def __init__(self, description=None, subcarrier=None):
        self.subcarrier = subcarrier
        if description is None:
            description = "singular channel"
            if subcarrier is not None:
                description += f" at subcarrier {subcarrier}"
        super().__init__(description)


class SingularCovarianceError(SingularChannelError):
    """
    Effective noise covariance that cannot be inverted.
    """

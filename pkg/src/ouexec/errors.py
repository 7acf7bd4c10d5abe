"""Exception and warning types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, RegimeError -> 2,
NumericalError -> 3.
"""


class ConfigError(ValueError):
    """Invalid parameters, state, strategy, or run configuration."""


class RegimeError(RuntimeError):
    """The requested computation is not defined for this parameter regime."""


class NumericalError(RuntimeError):
    """A root find or quadrature failed to reach its tolerance."""


class ResolutionError(NumericalError):
    """The discrete solver's period count is too small for this instance."""


class StandingAssumptionWarning(UserWarning):
    """Inputs violate the standing assumption z > 2y.

    Results are still computed in extended mode but carry no optimality
    claim among nonnegative strategies.
    """

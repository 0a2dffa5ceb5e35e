"""Exception types mapped to CLI exit codes."""


class AerialcovError(Exception):
    exit_code = 1


class ConfigError(AerialcovError):
    """Bad or missing configuration (exit code 2)."""

    exit_code = 2


class NumericsError(AerialcovError):
    """Quadrature / root-finding failure (exit code 3)."""

    exit_code = 3


class ValidationError(AerialcovError):
    """An oracle cross-check failed (exit code 1)."""

    exit_code = 1


class NoRouteError(AerialcovError):
    """No BS covers S or D at the search floor; trajectory infeasible."""

    exit_code = 1

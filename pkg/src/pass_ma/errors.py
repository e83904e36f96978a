"""Exception hierarchy shared by the solver modules and the CLI."""


class PassError(Exception):
    """Base class for all errors raised by pass_ma."""


class InfeasibleGeometryError(PassError):
    """No placement satisfies the box and spacing constraints, i.e. (N-1)*delta > L."""


class UnreachableUserError(PassError, ValueError):
    """A channel gain is non-positive, so no finite power meets the rate target."""


class SingularGeometryError(PassError):
    """Both users see the reference PA under the same direction cosine."""


class SolverError(PassError):
    """The convex subproblem solver failed or returned an infeasible point."""

    def __init__(self, message, constraint=None):
        super().__init__(message)
        self.constraint = constraint


class ResourceGuardError(PassError):
    """A brute-force search would enumerate too many candidates."""


class ConfigError(PassError):
    """Malformed scenario configuration file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line

"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class QWGatesError(Exception):
    exit_code = 1


class ConfigError(QWGatesError):
    """Configuration document failed to parse or validate.

    ``path`` is a JSONPath-like pointer into the document (``$.simulation.dt``).
    """

    exit_code = 2

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class GraphError(QWGatesError):
    exit_code = 3


class ResonanceError(QWGatesError):
    """Two distinct pulse components are resonant with the same edge."""

    exit_code = 3


class HermiticityError(QWGatesError):
    exit_code = 3


class LeakageError(QWGatesError):
    """Quasienergy ladder truncation lost too much probability; raise M."""

    exit_code = 5


class ReductionError(QWGatesError):
    exit_code = 6


class ConditionViolated(ReductionError):
    pass


class SynthesisError(QWGatesError):
    exit_code = 7


class InfeasibleIntegers(SynthesisError):
    pass


class RefinementStalled(SynthesisError):
    pass


class VerificationError(QWGatesError):
    exit_code = 8

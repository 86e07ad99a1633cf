"""
Exception hierarchy.

Every error carries the process exit code the CLI reports for it:
0 success, 1 verification failure, 2 invalid input or spec, 3 numeric failure.
"""


class FKWaveError(Exception):
    exit_code = 2


class InputError(FKWaveError):
    exit_code = 2


class AxiomViolation(InputError):
    """A nonlinearity spec breaks one of the structural assumptions."""

    def __init__(self, axiom: str, detail: str):
        self.axiom = axiom
        self.detail = detail
        super().__init__(f"{axiom} violated: {detail}")


class DomainError(InputError):
    pass


class ConfigurationError(InputError):
    pass


class PreconditionError(InputError):
    pass


class UnsupportedSpecError(InputError):
    pass


class NumericError(FKWaveError):
    exit_code = 3

    def __init__(self, message: str, bracket: tuple[float, float] | None = None):
        self.bracket = bracket
        if bracket is not None:
            message = f"{message} (bracket [{bracket[0]:.6g}, {bracket[1]:.6g}])"
        super().__init__(message)


class DomainExhaustedError(NumericError):
    pass


class EstimationError(NumericError):
    pass


class VerificationFailure(FKWaveError):
    exit_code = 1

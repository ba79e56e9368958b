"""Exception hierarchy shared by the library, the service and the CLI."""


class QplexError(Exception):
    """Base class for every error raised by qplex."""


class ModelError(QplexError):
    """The optimization model is malformed or violates a modeling rule."""


class ConversionError(QplexError):
    """A model cannot be turned into a QUBO (continuous variables, empty box...)."""


class CircuitError(QplexError):
    """Invalid circuit construction arguments."""


class QasmError(QplexError):
    """OpenQASM text outside the supported subset, or malformed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class OptimizationError(QplexError):
    """Raised when the loss returns a non-finite value; carries the partial trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class BackendError(QplexError):
    """Failure selecting, configuring or running a solver backend."""


class UnknownBackendError(BackendError):
    pass


class BackendMismatchError(BackendError):
    pass


class CapacityError(BackendError):
    """Input is larger than what the solver or device can handle."""


class CredentialError(BackendError):
    pass


class DeviceSelectionError(BackendError):
    pass


class RemoteError(BackendError):
    """Base for failures talking to a remote provider."""


class RemoteHTTPError(RemoteError):
    pass


class AuthError(RemoteError):
    pass


class JobFailedError(RemoteError):
    pass


class PayloadMismatchError(RemoteError):
    pass

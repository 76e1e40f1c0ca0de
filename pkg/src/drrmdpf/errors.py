"""drrmdpf errors."""


class DrrMdpfException(Exception):
    """Base error for drrmdpf."""


class UsageError(DrrMdpfException):
    """Operation called with arguments outside its contract."""


class MalformedName(UsageError):
    """Content name is not a hierarchical /a/b/c name."""


class ConvergenceError(DrrMdpfException):
    """Iterative solver hit its iteration limit."""

    def __init__(self, message: str, *, residual: float):
        super().__init__(message)
        self.residual = residual


class ConfigurationError(DrrMdpfException):
    """Scenario or topology cannot be turned into a runnable simulation."""


class ScenarioParseError(ConfigurationError):
    """Scenario file rejected, line is 1-based (0 when not tied to a line)."""

    def __init__(self, message: str, *, line: int = 0):
        if line:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class TopologyParseError(ConfigurationError):
    """Topology file rejected, line is 1-based (0 when not tied to a line)."""

    def __init__(self, message: str, *, line: int = 0):
        if line:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SimulationError(DrrMdpfException):
    """Run aborted: event cap reached or causality violated."""


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

EXIT_CODES = {
    UsageError: EXIT_USAGE,
    ScenarioParseError: EXIT_USAGE,
    TopologyParseError: EXIT_USAGE,
    ConfigurationError: EXIT_USAGE,
    ConvergenceError: EXIT_RUNTIME,
    SimulationError: EXIT_RUNTIME,
}


def get_exit_code(err: Exception) -> int:
    """Function for mapping an error to a CLI exit code"""
    for error_type in type(err).__mro__:
        if error_type in EXIT_CODES:
            return EXIT_CODES[error_type]

    return EXIT_RUNTIME

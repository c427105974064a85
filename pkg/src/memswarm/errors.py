"""Exception hierarchy shared by the solvers and the CLI."""


class MemswarmError(Exception):
    """Base class for every error raised by this package."""


# graph construction / oracles
class GraphError(MemswarmError, ValueError):
    pass


class NonPositiveLength(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class UnknownTerminal(GraphError):
    pass


class DisconnectedTerminals(GraphError):
    pass


class PathBudgetExceeded(GraphError):
    pass


# ant colony
class NoAllowableMove(MemswarmError):
    """Every neighbour of the current node is forbidden."""


class UnsupportedExponents(MemswarmError, ValueError):
    pass


class ZeroEvaporation(MemswarmError, ValueError):
    pass


# memristive network
class StateOutOfRange(MemswarmError, ValueError):
    pass


class NonIntegerLengthInChainMode(MemswarmError, ValueError):
    pass


class ZeroRelaxation(MemswarmError, ValueError):
    pass


class NumericalError(MemswarmError, ArithmeticError):
    """Integration or linear-algebra failure."""


class StateBlowup(NumericalError):
    pass


class SingularSystem(NumericalError):
    pass


class NoPathExtractable(MemswarmError):
    """Readout could not walk from source to target."""


# configuration
class ConfigError(MemswarmError):
    pass


class ParseError(ConfigError):
    pass


class ConfigValidationError(ConfigError, ValueError):
    """Invalid configuration; ``field`` holds the dotted path of the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class UnknownPreset(ConfigError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)

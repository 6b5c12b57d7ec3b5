"""Exception taxonomy shared by the library and the CLI exit-code contract."""


class ToolError(Exception):
    stage = "generic"


class ConfigError(ToolError):
    stage = "config"


class DataError(ToolError):
    stage = "data"


class CsvParseError(DataError):
    """Malformed input row (wrong arity or non-numeric cell)."""


class ValidationError(ToolError):
    """Precondition or invariant violation (dimension mismatch, bad range...)."""
    stage = "validation"


class TrainError(ToolError):
    stage = "train"


class NetlistError(ToolError):
    """Structural netlist violation (multiple drivers, combinational cycle)."""
    stage = "netlist"


class SimulationError(ToolError):
    stage = "simulate"


class EquivalenceError(ToolError):
    stage = "equivalence"


class CostError(ToolError):
    stage = "cost"


# CLI exit codes: 0 success, distinct nonzero per failure family.
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_TRAIN = 4
EXIT_EQUIVALENCE = 5
EXIT_COST = 6
EXIT_OTHER = 1

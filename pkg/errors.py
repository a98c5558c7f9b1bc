"""
Exception hierarchy for the emulator.

Every error raised on bad input derives from both EmulatorError and
ValueError, so callers may catch either.
"""


class EmulatorError(Exception):
    """Base class for all emulator errors"""


class GridError(EmulatorError, ValueError):
    """Invalid grid extent or qubit count"""


class PacketError(EmulatorError, ValueError):
    """Wave packet or potential specification cannot be realized on the grid"""


class StateError(EmulatorError, ValueError):
    """Statevector shape, norm or index problems"""


class CircuitError(EmulatorError, ValueError):
    """Circuit construction or composition problems"""


class InitializerFitError(CircuitError):
    """The fitted initializer did not reach the required fidelity"""

    def __init__(self, message, fidelity):
        super().__init__(message)
        self.fidelity = fidelity


class KineticEquivalenceError(CircuitError):
    """The kinetic circuit disagrees with the FFT propagator"""


class QasmParseError(CircuitError):
    """Malformed OpenQASM input"""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class OracleError(EmulatorError, ValueError):
    """Invalid input to the classical reference propagator"""


class ScenarioError(EmulatorError, ValueError):
    """Scenario document failed validation"""

    def __init__(self, message, field=None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field


class OutputError(EmulatorError, OSError):
    """Writing run artifacts failed"""

    def __init__(self, message, path):
        super().__init__(f"{message} ({path})")
        self.path = str(path)

"""Exception types shared across the package.

The split matters for the command line front end: user-facing parameter
problems (bad reflectivity, odd atom count, degenerate walk bias) map to
exit code 2, while internal contract violations (a non-unitary matrix, a
wiring that loses probability) map to exit code 3.
"""


class CavnetError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(CavnetError, ValueError):
    """A caller-supplied parameter is outside the supported domain."""


class InvalidLabelError(ParameterError):
    """A subsystem or basis label does not exist in the register."""


class ShapeError(ParameterError):
    """An operand has the wrong dimensions for its target subsystems."""


class DegenerateCouplingError(ParameterError):
    """Both couplings vanish where a coupled block is required."""


class AccuracyError(ParameterError):
    """An integration grid is too coarse to honour the accuracy contract."""


class GraphError(ParameterError):
    """A graph specification is malformed (bad endpoint, self loop, duplicate)."""


class ContractViolationError(CavnetError):
    """An internal invariant failed (non-unitary operator, norm drift)."""


class LossyWiringError(ContractViolationError):
    """Detector probabilities of a lossless scheme do not sum to one."""


class InvalidConfigurationError(ContractViolationError):
    """A state reached a sector an element is not defined on."""


class NumericalBlowupError(ContractViolationError):
    """An integration produced non-finite values."""


class NotSingleExcitationError(CavnetError, ValueError):
    """A state expected to carry exactly one excitation does not."""

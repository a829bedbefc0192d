"""Exception types shared across the library."""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class TruncationNotConverged(SimulationError):
    """Low-lying spectrum still moving when the Fock truncation is enlarged."""


class EigenstateTrackingLost(SimulationError):
    """Overlap between consecutive sweep points too small to identify a state."""


class DegenerateCoefficient(SimulationError):
    """A coefficient ratio is requested where the denominator vanishes."""


class NegativeCarrier(SimulationError):
    """A solved drive carrier frequency came out nonpositive."""


class DegeneratePoint(SimulationError):
    """Instantaneous eigensystem requested where all couplings vanish."""


class UndefinedAtZeroAngle(SimulationError):
    """Analytic correlator estimate evaluated at sin(theta) = 0."""


class StepSizeUnderflow(SimulationError):
    """Adaptive integrator step collapsed below the resolvable scale."""


class NormUnderflow(SimulationError):
    """Trajectory norm decayed to zero without crossing the jump threshold."""


class PositivityViolation(SimulationError):
    """A density matrix developed a negative eigenvalue beyond tolerance."""


class ZeroDenominator(SimulationError):
    """Correlator normalization fell below the masking threshold."""


class EmptyWindow(SimulationError):
    """Extremum search window contains no valid samples."""


class ParseError(SimulationError):
    """Scenario file is not well-formed structured text."""


class ValidationError(SimulationError):
    """Scenario content violates a documented invariant."""

"""Exception hierarchy.

Every numerical failure mode raises a dedicated class so callers (and the CLI
exit-code logic) can tell a bad configuration from a genuine numerical
breakdown.
"""


class FinitegapError(Exception):
    """Base class for all library errors."""


class ConfigError(FinitegapError):
    """Invalid user input / job configuration."""


class NonConvergence(FinitegapError):
    """Adaptive quadrature stalled above the requested tolerance."""


class StepUnderflow(FinitegapError):
    """Adaptive ODE step collapsed below machine scale (near-singularity)."""


class NoConvergence(FinitegapError):
    """Root iteration exhausted its budget."""


class DerivativeVanishes(FinitegapError):
    """Root iteration hit a vanishing derivative away from a root."""


class AmbiguousPairing(FinitegapError):
    """Branch points too close to the real axis to pair under conjugation."""


class DegenerateCurve(FinitegapError):
    """Branch points coincide or nearly collide."""


class CutCollision(FinitegapError):
    """No valid disjoint cut layout exists for this branch configuration."""


class StepTooCoarse(FinitegapError):
    """Square-root continuation could not disambiguate the sheet."""


class SingularNormalization(FinitegapError):
    """The a-period matrix is numerically singular."""


class BasisConstructionError(FinitegapError):
    """Homology cycles failed the canonical-intersection verification."""


class AdaptedBasisUnavailable(FinitegapError):
    """No conjugation-adapted basis is constructed for this configuration."""


class RadiusOverflow(FinitegapError):
    """Theta series would need more lattice points than the budget allows."""


class OnThetaDivisor(FinitegapError):
    """Evaluation requested too close to a zero of the theta function."""


class DivisorPole(FinitegapError):
    """The Bloch function has a pole at the requested point."""


class Collision(FinitegapError):
    """Dubrovin trajectory points collided (denominator degenerate)."""


class VerificationError(FinitegapError):
    """An internal cross-check exceeded its tolerance."""

"""Domain exceptions shared across the package."""


class QwalkError(Exception):
    """Base class for errors raised by qwalk operations."""


class GapClosure(QwalkError):
    """Quasienergy gap closed: the rotation axis is undefined at this momentum."""


class FlatBand(QwalkError):
    """The energy band is flat, so dynamics cannot resolve per-momentum axes."""


class Collinear(QwalkError):
    """Spinor trajectory samples do not determine a plane."""


class ProjectionDegenerate(QwalkError):
    """An axis sample lies too close to the chiral axis to project."""


class NonInteger(QwalkError):
    """Accumulated winding cannot be read as an integer (noisy or under-resolved data)."""


class NonConvergence(QwalkError):
    """Likelihood minimisation did not reach a statistically plausible fit."""

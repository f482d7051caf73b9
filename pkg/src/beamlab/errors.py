"""Exception types raised by beamlab estimators and builders."""


class BeamlabError(Exception):
    """Base class for all beamlab errors."""


class InvalidGeometryError(BeamlabError):
    """Array geometry is empty or element positions are not strictly increasing."""


class InvalidScenarioError(BeamlabError):
    """Scenario parameters violate their constraints (e.g. K = 0, negative powers)."""


class DimensionError(BeamlabError):
    """Inputs have inconsistent shapes."""


class UndefinedCorrelationError(BeamlabError):
    """Pearson correlation requested for a zero-variance column."""


class InsufficientPeaksError(BeamlabError):
    """Fewer spectral peaks detected than requested.

    The number of peaks that were found is available as ``found``.
    """

    def __init__(self, requested: int, found: int):
        super().__init__(f"requested {requested} spectral peaks, found {found}")
        self.requested = requested
        self.found = found


class InsufficientDataError(BeamlabError):
    """Not enough samples for the requested fit (quadratic needs K >= 3)."""


class InvalidSectorsError(BeamlabError):
    """Empty sector list, or sectors overlapping the desired-signal region."""


class DegenerateShrinkageError(BeamlabError):
    """Shrinkage target indistinguishable from a scaled identity matrix."""


class SingularMatrixError(BeamlabError):
    """A matrix that must be inverted or factorized is numerically singular."""


class NullStartError(BeamlabError):
    """Power iteration started in the null space and the restart also failed."""


class RankDeficientError(BeamlabError):
    """Steering matrix is rank deficient (repeated DoAs)."""

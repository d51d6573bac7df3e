"""Exception types shared across the package."""


class TubeGeoError(Exception):
    """Base class for all package errors."""


class DomainInputError(TubeGeoError):
    """Malformed or unknown domain / map / measure descriptor."""


class EvaluationDomainError(TubeGeoError):
    """Evaluation point violates a contract (e.g. |lambda| too close to 1)."""


class QuadratureError(TubeGeoError):
    """Adaptive quadrature failed to converge within the refinement budget."""


class NonIntegrableDensity(QuadratureError):
    """Quadrature of a density norm diverges under refinement near a declared
    singular point; the requested construction is impossible."""


class InvalidAtomError(TubeGeoError):
    """A singular atom violates one of the geodesy side conditions."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ConstructionError(TubeGeoError):
    """The face-selection recipe cannot produce a density (empty faces on a
    set of positive measure, missing selection rule, ...)."""


class UnsupportedReduction(TubeGeoError):
    """Pushforward of the domain under the reduction matrix has no closed
    form in the registry."""

"""Exception and warning classes raised across the package."""


class EllCohomError(ValueError):
    """Base class for all input and degeneracy errors raised by ellcohom."""


class InvalidModularParam(EllCohomError):
    pass


class PrecisionLossWarning(RuntimeWarning):
    """Emitted when |q| > 0.9 and the theta product converges slowly."""


class NearSingular(EllCohomError):
    pass


class DimensionMismatch(EllCohomError):
    pass


class NotPrimitive(EllCohomError):
    pass


class NotTransversal(EllCohomError):
    pass


class NotUnimodular(EllCohomError):
    pass


class MalformedForest(EllCohomError):
    pass


class SizeLimit(EllCohomError):
    pass


class NotConvenient(EllCohomError):
    """Weights fail a convenience test.

    ``witness`` holds the offending index subset (weights for discriminantal
    convenience, hyperplanes for arrangement convenience).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotAdmissible(EllCohomError):
    pass


class OnHyperplane(EllCohomError):
    pass


class Degenerate(EllCohomError):
    pass


class DegenerateM(EllCohomError):
    pass


class BadDirection(EllCohomError):
    pass


class RankDeficient(EllCohomError):
    pass


class DuplicateZ(EllCohomError):
    pass

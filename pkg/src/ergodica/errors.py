"""Exception hierarchy with machine-readable codes (mirrored in CLI JSON output)."""


class ErgodicaError(Exception):
    """Base class; `code` is the stable machine-readable identifier."""

    code = "E_INTERNAL"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__doc__ or self.code)


class NotSquareError(ErgodicaError):
    code = "E_NOT_SQUARE"


class NotHermitianError(ErgodicaError):
    code = "E_NOT_HERMITIAN"


class NotPSDError(ErgodicaError):
    code = "E_NOT_PSD"


class SingularMatrixError(ErgodicaError):
    code = "E_SINGULAR"


class DimensionMismatchError(ErgodicaError):
    code = "E_DIMENSION"


class ClusteringAmbiguousError(ErgodicaError):
    code = "E_CLUSTERING_AMBIGUOUS"


class NotFaithfulError(ErgodicaError):
    code = "E_NOT_FAITHFUL"


class NotInvariantError(ErgodicaError):
    code = "E_NOT_INVARIANT"


class SupportNotInvariantError(ErgodicaError):
    code = "E_SUPPORT_NOT_INVARIANT"


class TrivialProjectionError(ErgodicaError):
    code = "E_TRIVIAL_PROJECTION"


class FamilyNotClosedError(ErgodicaError):
    code = "E_FAMILY_NOT_CLOSED"


class NotInAlgebraError(ErgodicaError):
    code = "E_NOT_IN_ALGEBRA"


class NotInvariantMeasureError(ErgodicaError):
    code = "E_NOT_INVARIANT_MEASURE"


class DimensionOverflowError(ErgodicaError):
    code = "E_DIM_OVERFLOW"


class TwistIncompatibleError(ErgodicaError):
    code = "E_TWIST_INCOMPATIBLE"


class SpecParseError(ErgodicaError):
    code = "E_PARSE"


class InternalError(ErgodicaError):
    code = "E_INTERNAL"

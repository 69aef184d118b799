"""Exception hierarchy shared by all cdirac modules."""


class CDiracError(Exception):
    """Base class for every error raised by the toolkit."""


class DimensionMismatch(CDiracError, ValueError):
    pass


class NotConjugationStable(CDiracError, ValueError):
    pass


class NotSkew(CDiracError, ValueError):
    pass


class NotLagrangian(CDiracError, ValueError):
    pass


class NonTransversal(CDiracError, ValueError):
    pass


class InvalidStructure(CDiracError, ValueError):
    """Input violates a constructor precondition (J^2 != -I, T10 not totally complex, ...)."""


class InadmissibleProfile(CDiracError, ValueError):
    pass


class ReconstructionFailure(CDiracError, RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class TypeNotZero(CDiracError, ValueError):
    pass


class TypeNotMaximal(CDiracError, ValueError):
    pass


class KMismatch(CDiracError, ValueError):
    pass


class EvalError(CDiracError, ValueError):
    pass


class FrameDegenerate(CDiracError, ValueError):
    pass


class StencilOutOfDomain(CDiracError, ValueError):
    pass

__all__ = [
    "EigenIntervalError",
    "PsiDomainError",
    "UnsupportedEnsembleError",
    "UnsupportedSamplingError",
    "InternalConsistencyError",
    "PsiConvergenceError",
    "get_exception_chain",
]


class EigenIntervalError(Exception):
    """Base class for every error raised by eigen_interval."""


class PsiDomainError(EigenIntervalError, ValueError):
    """Parameter, interval or special-function argument outside its domain."""


class UnsupportedEnsembleError(EigenIntervalError):
    """Operation is not defined for the given ensemble kind."""


class UnsupportedSamplingError(UnsupportedEnsembleError):
    """Ensemble parameters admit no integer matrix dimensions to sample from."""


class InternalConsistencyError(EigenIntervalError):
    """A computed quantity violates an identity it must satisfy."""


class PsiConvergenceError(EigenIntervalError):
    """Series or continued fraction did not converge within its iteration cap."""


def get_exception_chain(exc: BaseException) -> tuple[BaseException, ...]:
    exceptions: list[BaseException] = []

    current_exc = exc

    while current_exc:
        exceptions.append(current_exc)
        current_exc = current_exc.__cause__

    return tuple(exceptions)

"""Exception types shared across the library."""


class DomainError(ValueError):
    """An argument lies outside the physically meaningful domain."""


class ModelIntegrityError(RuntimeError):
    """A structural guarantee of the thermalization model failed to hold."""


class NoStationaryStateError(ModelIntegrityError):
    """No numerically null eigenvalue was found; the generator is malformed."""


class EstimatorUndefinedError(RuntimeError):
    """The requested estimation setup does not admit a well-defined estimator."""

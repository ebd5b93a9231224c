"""Exception hierarchy shared by all quarterwalk modules.

Three families matter to callers (and to the CLI exit codes):

* ``ModelError`` -- the model data itself is unusable (exit code 2),
* ``NumericError`` -- a numerical routine could not deliver a certified
  result (exit code 3),
* ``ConfigError`` -- a model config file could not be read (exit code 4).
"""


class QuarterwalkError(Exception):
    """Base class for all package errors."""


# -- model / validation -------------------------------------------------


class ModelError(QuarterwalkError):
    pass


class EmptySupport(ModelError):
    """A step distribution carries no positive weight."""


class NotNormalized(ModelError):
    """Weights of a step distribution do not sum to 1 within 1e-12."""


class SupportOverflow(ModelError):
    """A convolution power would exceed the configured atom cap."""


class ValidationFailure(ModelError):
    """A model failed the standing assumptions of its declared class."""


class IdenticalReflectionsRequired(ModelError):
    """Operation only defined when all boundary laws coincide."""


class UnknownModel(ModelError):
    """Requested registry model does not exist."""


class ConfigError(QuarterwalkError):
    """Malformed model config file."""


# -- numerics -----------------------------------------------------------


class NumericError(QuarterwalkError):
    pass


class OutOfBranch(NumericError):
    """Branch inverse requested outside the monotone branch domain."""


class MaximizerNotBracketed(NumericError):
    """Branch maximizer search failed to bracket a stationary point."""


class NoInteriorRoot(NumericError):
    """Axis-hitting fixed point equation has no root in (0, 1)."""


class NoNegativeJumps(NumericError):
    """No mass on negative jumps: the walk can never reach the axis."""


class BranchEscape(NumericError):
    """A compensation iterate left the admissible branch rectangle."""


class PoleAtEvaluation(NumericError):
    """Rational coefficient evaluated at (or too close to) a pole."""


class TruncationInsufficient(NumericError):
    """Truncation error bound exceeds the requested tolerance."""


class PoleCollision(NumericError):
    """A competing pole sits too close to the dominant one."""


class MarginExhausted(NumericError):
    """A recursion step needs table values outside the trusted margin."""


class UnreachableOrigin(NumericError):
    """A singular-walk path landed on the origin: internal invariant broken."""

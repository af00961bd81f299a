"""Exception hierarchy shared by all modules."""


class EntDistillError(Exception):
    """Base class for every error raised by the library."""


class NotHermitian(EntDistillError, ValueError):
    pass


class NotSquare(EntDistillError, ValueError):
    pass


class ShapeMismatch(EntDistillError, ValueError):
    pass


class BadDimension(EntDistillError, ValueError):
    pass


class OutOfRange(EntDistillError, ValueError):
    pass


class NotDensityMatrix(EntDistillError, ValueError):
    pass


class DimensionMismatch(EntDistillError, ValueError):
    pass


class DimensionOverflow(EntDistillError, ValueError):
    """The requested operator would exceed ``MAX_MATRIX_DIM`` rows."""


class NonlinearAction(EntDistillError, ValueError):
    pass


class NotCompletelyPositive(EntDistillError, ValueError):
    pass


class NotViolating(EntDistillError, ValueError):
    """A filter was requested for a state that satisfies the reduction criterion."""


class ZeroProbability(EntDistillError, ValueError):
    pass

"""Exception hierarchy shared by every module of the package."""


class HolderTraceError(Exception):
    """Base class for all errors raised by holdertrace."""

    code = "error"


class NotHermitian(HolderTraceError, ValueError):
    code = "not_hermitian"


class NoConvergence(HolderTraceError, ArithmeticError):
    code = "no_convergence"


class NotPositive(HolderTraceError, ValueError):
    code = "not_positive"


class NegativeExponent(HolderTraceError, ValueError):
    code = "negative_exponent"


class ShapeMismatch(HolderTraceError, ValueError):
    code = "shape_mismatch"


class BadExponent(HolderTraceError, ValueError):
    code = "bad_exponent"


class ZeroOperator(HolderTraceError, ValueError):
    code = "zero_operator"


class UnknownKind(HolderTraceError, ValueError):
    code = "unknown_kind"


class ZeroBudget(HolderTraceError, ValueError):
    code = "zero_budget"


class UsageError(HolderTraceError):
    code = "usage_error"


class DataError(HolderTraceError):
    code = "data_error"

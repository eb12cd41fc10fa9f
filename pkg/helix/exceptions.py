"""
Error types raised by the helix library.

Every error carries a stable ``code`` (used in CLI diagnostics and API
payloads) and the process ``exit_code`` the command maps it to.
"""

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DEGENERATE = 3


class HelixError(ValueError):
    code = "helix-error"
    exit_code = EXIT_DATA

    def __init__(self, message="", **context):
        super().__init__(message or self.code)
        self.context = context


# ---------------------------------------------------------------------------
# Data errors (exit 2)
# ---------------------------------------------------------------------------
class DataError(HelixError):
    exit_code = EXIT_DATA


class EmptyDataError(DataError):
    code = "empty-data"


class InvalidDistributionError(DataError):
    code = "invalid-distribution"


class InvalidAxesError(DataError):
    code = "invalid-axes"


class SchemaError(DataError):
    code = "schema-error"


class BadCountError(DataError):
    code = "bad-count"

    def __init__(self, message="", row=None, **context):
        super().__init__(message, row=row, **context)
        self.row = row


class UnmappedCodeError(DataError):
    code = "unmapped-code"

    def __init__(self, codes):
        self.codes = sorted(set(codes))
        super().__init__(
            f"{len(self.codes)} code(s) not covered by the crosswalk: {', '.join(self.codes)}",
            codes=self.codes,
        )


class CrosswalkError(DataError):
    code = "crosswalk-error"


class PanelInconsistentError(DataError):
    code = "panel-inconsistent"


class ShapeMismatchError(DataError):
    code = "shape-mismatch"


class SeriesTooShortError(DataError):
    code = "series-too-short"


class InsufficientPointsError(DataError):
    code = "insufficient-points"


# ---------------------------------------------------------------------------
# Numeric degeneracy (exit 3)
# ---------------------------------------------------------------------------
class DegeneracyError(HelixError):
    exit_code = EXIT_DEGENERATE


class DegenerateDenominatorError(DegeneracyError):
    code = "degenerate-denominator"


class ZeroMeanBaselineError(DegeneracyError):
    code = "zero-mean-baseline"


class DegenerateSeriesError(DegeneracyError):
    code = "degenerate-series"


class SingularFitError(DegeneracyError):
    code = "singular-fit"

"""Exception hierarchy. Each class carries the process exit code the CLI maps it to."""


class CreditworksError(Exception):
    exit_code = 1


class DataError(CreditworksError):
    """Bad or unusable input data."""

    exit_code = 2


class SchemaError(DataError):
    """Column spec and data disagree (unknown column, header mismatch, bad role)."""


class ParseError(DataError):
    """CSV framing is broken; message carries the offending line number."""


class EmptyDatasetError(DataError):
    """No usable rows remain after filtering."""


class UnresolvableColumnError(DataError):
    """A column cannot be filled because it has no observed values."""


class TrainingError(CreditworksError):
    """Training is degenerate (for example a single-class target)."""

    exit_code = 3


class ModelDataMismatchError(CreditworksError):
    """A fitted model or scaler does not match the data it is applied to."""

    exit_code = 4


class MissingExposureColumnError(CreditworksError):
    """The table lacks a column required for exposure or pricing."""

    exit_code = 5


class UsageError(CreditworksError):
    """Bad command line or config usage."""

    exit_code = 64

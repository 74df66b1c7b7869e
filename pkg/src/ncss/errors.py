"""Exception hierarchy for the ncss package.

Three broad families, matching the CLI exit-code classes:
config/parameter problems, pipeline/data problems, and optimizer
infeasibility.
"""


class NcssError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(NcssError):
    """Invalid parameters or configuration (CLI exit code 2)."""


class PipelineError(NcssError):
    """Data-path failure during encode/store/fetch/decode (CLI exit code 3)."""


# ---------------------------------------------------------------------------
# field / linear algebra

class ZeroInverseError(ConfigError, ZeroDivisionError):
    """Multiplicative inverse of zero requested."""


class DuplicatePointError(ConfigError):
    """Evaluation points for the encoding matrix must be pairwise distinct."""


class ZeroPointError(ConfigError):
    """Evaluation points for the encoding matrix must be nonzero."""


class TooManyPointsError(ConfigError):
    """More evaluation points requested than distinct nonzero field elements."""


class DimensionMismatchError(PipelineError):
    """Vector or matrix dimensions do not agree."""


class SingularMatrixError(PipelineError):
    """Matrix has no inverse; signals corrupted internal state."""


# ---------------------------------------------------------------------------
# digit codec

class BadBaseError(ConfigError):
    """Digit base must be at least 2."""


class StrictUnavailableError(ConfigError):
    """Width-preserving mode needs d a power of two with log2(d) dividing k."""


class BadAlphaError(ConfigError):
    """Expansion bound alpha must be >= 1."""


class ElementOverflowError(ConfigError):
    """A regrouped digit slice does not fit in the field."""


class EmptyInputError(ConfigError):
    """Operation requires a non-empty digit string."""


class PlanMismatchError(PipelineError):
    """Data does not match the grouping plan it is paired with."""


class BadAssignmentError(ConfigError):
    """Per-cloud element assignment is not a partition of the block."""


# ---------------------------------------------------------------------------
# distribution planning

class BadCountError(ConfigError):
    """Stored-digit count out of range."""


class TooManySecretDigitsError(ConfigError):
    """Cannot retain more secret digits than there are components."""


# ---------------------------------------------------------------------------
# optimizer

class InfeasibleError(NcssError):
    """No (n, l) pair satisfies the constraints (CLI exit code 4)."""


class EnumerationTooLargeError(ConfigError):
    """Exhaustive enumeration would exceed the configured bound."""


# ---------------------------------------------------------------------------
# adversary lab

class TooManyUnknownsError(ConfigError):
    """Guess simulation is intractable for this many unknown digits."""


# ---------------------------------------------------------------------------
# storage fabric

class BackendUnavailableError(PipelineError):
    """A cloud backend cannot be reached."""


class WriteFailureError(PipelineError):
    """A shard or manifest could not be persisted."""


class MissingShardError(PipelineError):
    """A shard referenced by the manifest is absent."""


class ChecksumMismatchError(PipelineError):
    """Shard payload does not match its recorded checksum."""


class IncompleteDataError(PipelineError):
    """Recovered digits do not cover the full stream."""

"""Exception hierarchy shared across the toolkit."""


class TermRankError(Exception):
    """Base class for all toolkit errors."""


class MarginViolation(TermRankError, ValueError):
    """Contingency counts are inconsistent (negative cell or broken margin)."""


class UnsupportedMeasure(TermRankError, ValueError):
    """The requested measure has no scalar formula (it is an ordering)."""


class UnknownMeasure(TermRankError, ValueError):
    """Measure name not among the 13 supported identifiers."""


class EmptyInput(TermRankError, ValueError):
    """An operation received an empty collection."""


class DegenerateDataset(TermRankError, ValueError):
    """Too few candidates to build a feature matrix."""


class DimensionMismatch(TermRankError, ValueError):
    """Vector length does not match the hypothesis dimension."""


class SingleClass(TermRankError, ValueError):
    """Labels contain only one class; ranking metrics are undefined."""


class TooFewExamples(TermRankError, ValueError):
    """Not enough examples per class for the requested fold count."""


class UnknownTag(TermRankError, ValueError):
    """POS pattern references a tag absent from the corpus tag set."""


class EmptyCorpus(TermRankError, ValueError):
    """No token pair in the corpus matches the requested pattern."""


class ParseError(TermRankError, ValueError):
    """A data file row could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(TermRankError, ValueError):
    """A data file violates the expected schema or an invariant."""

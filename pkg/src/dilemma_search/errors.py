"""Exception hierarchy shared by the search engines, adapters and parsers."""


class DilemmaSearchError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(DilemmaSearchError, ValueError):
    pass


class BudgetZero(ConfigError):
    pass


class AdapterError(DilemmaSearchError):
    """A problem adapter broke its contract (e.g. no actions on a non-candidate)."""


class DomainError(DilemmaSearchError, ValueError):
    pass


class NotCandidate(DilemmaSearchError):
    pass


class IllegalAction(DilemmaSearchError, ValueError):
    pass


class TooLarge(DilemmaSearchError):
    pass


class CapacityOverflow(TooLarge):
    pass


class EmptySubset(DilemmaSearchError, ValueError):
    pass


class UnknownAttribute(DilemmaSearchError, KeyError):
    pass


class RatioError(ConfigError):
    pass


class TooFewRows(DilemmaSearchError, ValueError):
    pass


class DisjointnessError(DilemmaSearchError, ValueError):
    """Validation rows overlap the training rows."""


class ParseError(DilemmaSearchError, ValueError):
    """Malformed input text; ``line`` is 1-based, ``column`` optional."""

    def __init__(self, line, reason, column=None):
        self.line = line
        self.reason = reason
        self.column = column
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {reason}")


class RaggedRow(ParseError):
    def __init__(self, line, expected, found):
        self.expected = expected
        self.found = found
        super().__init__(line, f"expected {expected} cells, found {found}")

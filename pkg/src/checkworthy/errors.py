"""Exception types shared across the package.

Every library error derives from CheckworthyError so callers (CLI, HTTP
service) can map failures to exit codes / status codes in one place.
"""


class CheckworthyError(Exception):
    """Base class for all errors raised by this package."""


class EmptyInput(CheckworthyError):
    pass


class MissingResource(CheckworthyError):
    pass


class ParseError(CheckworthyError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DimMismatch(CheckworthyError):
    pass


class EmptyDictionary(CheckworthyError):
    pass


class EmptyCorpus(CheckworthyError):
    pass


class InvalidHyperparameter(CheckworthyError):
    pass


class LayoutMismatch(CheckworthyError):
    pass


class TooFewSamples(CheckworthyError):
    pass


class EmptyMask(CheckworthyError):
    pass


class EmptyDataset(CheckworthyError):
    pass


class UnknownSource(CheckworthyError):
    pass


class UnknownDebateId(CheckworthyError):
    pass


class DuplicateIndex(CheckworthyError):
    pass


class NonFiniteScore(CheckworthyError):
    pass


class VersionMismatch(CheckworthyError):
    pass


class CorruptBundle(CheckworthyError):
    pass

class SplatcutError(Exception):
    """Base class for all package errors."""


class InputError(SplatcutError):
    """Bad user-supplied data (files, flags, request bodies). CLI exit code 2."""


class SchemaError(InputError):
    """A file does not match its declared layout."""


class NoSeedsError(SplatcutError):
    """No high-confidence nodes on a required terminal side."""

    def __init__(self, side: str):
        self.side = side
        super().__init__(
            f"no reliable {side} seeds; widen thresholds or add input"
        )

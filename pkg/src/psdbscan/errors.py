"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid argument to a library operation (bad id, bad parameter)."""


class DataError(ValueError):
    """Malformed input file content (parse failures, inconsistent rows)."""


class ProtocolError(RuntimeError):
    """Violation of the push/pull protocol contract (missing push, barrier
    timeout, label corruption)."""

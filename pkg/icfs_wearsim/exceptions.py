class WearSimError(Exception):
    """Base exception for icfs-wearsim errors."""
    pass

class ConfigurationError(WearSimError):
    """Raised when configuration is missing or invalid."""
    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key

class TraceError(WearSimError):
    """Raised when a failure trace is malformed or runs out of outcomes."""
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line

class InvariantError(WearSimError):
    """Raised when the simulation breaks one of its own invariants (a bug, not a result)."""
    pass

class ExhaustedError(WearSimError):
    """Raised when no unallocated block is left to satisfy an allocation."""
    pass

class DomainError(WearSimError, ValueError):
    """Raised when a metric or oracle is evaluated outside its domain."""
    pass

class ResultsError(WearSimError):
    """Raised when report inputs are missing or unreadable."""
    def __init__(self, message, missing=None):
        super().__init__(message)
        self.missing = list(missing or [])

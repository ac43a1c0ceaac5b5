"""Exception hierarchy shared by every layer of the join engine."""


class SSSJError(Exception):
    """Base class for all errors raised by this package."""


class EmptyVector(SSSJError, ValueError):
    pass


class NegativeCoordinate(SSSJError, ValueError):
    pass


class NegativeDelta(SSSJError, ValueError):
    pass


class InvalidThreshold(SSSJError, ValueError):
    pass


class InvalidDecay(SSSJError, ValueError):
    pass


class WrongOrderMode(SSSJError, RuntimeError):
    """Backward truncation was requested on a list that lost its time order."""


class OutOfOrderStream(SSSJError, ValueError):
    def __init__(self, item_id: int, timestamp: float, previous: float) -> None:
        super().__init__(
            f"item {item_id} has timestamp {timestamp!r} older than {previous!r}"
        )
        self.item_id = item_id


class InternalInconsistency(SSSJError, RuntimeError):
    pass


class ParseError(SSSJError, ValueError):
    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class FormatError(SSSJError, ValueError):
    pass


class TruncatedFile(SSSJError, ValueError):
    pass

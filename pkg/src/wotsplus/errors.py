class WotsError(Exception):
    pass


class InvalidParameter(WotsError, ValueError):
    pass


class InvalidLength(WotsError, ValueError):
    pass


class MaskRangeError(WotsError, IndexError):
    pass


class KeyAlreadyUsed(WotsError):
    pass


class MalformedEncoding(WotsError, ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class DomainTooLarge(WotsError, ValueError):
    pass


class IndexRange(WotsError, ValueError):
    pass


class OutOfRange(WotsError, ValueError):
    pass


class InternalInconsistency(WotsError, AssertionError):
    """A reduction claimed a solution that does not check out under f_k."""

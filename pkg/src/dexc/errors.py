class DexError(Exception):
    """Base class for every error raised by the package."""


class ParseError(DexError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")


class SignatureError(DexError):
    pass


class TypingError(DexError):
    pass


class DecorationError(DexError):
    pass


class ModelError(DexError):
    pass


class KernelError(DexError):
    """A rule application was rejected."""


"""Exception hierarchy shared by every module."""


class YamabeLabError(Exception):
    """Base class for all errors raised by the package."""


class DimensionError(YamabeLabError, ValueError):
    pass


class DomainError(YamabeLabError, ValueError):
    pass


class UnsupportedGrid(YamabeLabError, TypeError):
    pass


class ReflectionOutOfDomain(YamabeLabError, ValueError):
    pass


class NonConvergence(YamabeLabError, RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class BracketFailure(YamabeLabError, RuntimeError):
    pass


class FormatError(YamabeLabError, ValueError):
    pass


class IoError(YamabeLabError, OSError):
    pass

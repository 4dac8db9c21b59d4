class LpgnetError(Exception):
    pass


class ConfigError(LpgnetError, ValueError):
    pass


class ShapeError(LpgnetError, ValueError):
    def __init__(self, message: str, expected=None, actual=None):
        self.expected = expected
        self.actual = actual
        super().__init__(message)

    def __str__(self):
        if self.expected is None:
            return super().__str__()
        return f"{super().__str__()} (expected {self.expected}, got {self.actual})"

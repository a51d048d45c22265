"""Exception types raised across the package."""


class RefineError(Exception):
    """Base class for all errors raised by labelrefine."""


class DimensionMismatch(RefineError):
    pass


class EmptyInput(RefineError):
    pass


class LabelOutOfRange(RefineError):
    def __init__(self, index, value, k):
        super().__init__(f"label {value} at position {index} is outside [0, {k})")
        self.index = index
        self.value = value
        self.k = k


class ZeroVector(RefineError):
    def __init__(self, row):
        super().__init__(f"zero vector at row {row}: direction undefined")
        self.row = row


class EmptyCluster(RefineError):
    def __init__(self, cluster):
        super().__init__(f"cluster {cluster} has no members")
        self.cluster = cluster


class InfiniteDivergence(RefineError):
    pass


class WeightMismatch(RefineError):
    pass


class KTooLarge(RefineError):
    pass


class LengthMismatch(RefineError):
    pass


class ShapeMismatch(RefineError):
    pass


class MixedPolarity(RefineError):
    pass


class ParseError(RefineError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


class InconsistentDim(ParseError):
    pass


class RaggedRows(ParseError):
    pass


class AllOOV(RefineError):
    def __init__(self, text):
        super().__init__(f"no in-vocabulary tokens in: {text!r}")
        self.text = text

"""Exception types raised across the package."""


class SampleProjError(Exception):
    """Base class for all validation errors raised by this package."""


class InvalidEntry(SampleProjError, ValueError):
    pass


class RankDeficient(SampleProjError, ValueError):
    def __init__(self, rank, p):
        self.rank = rank
        self.p = p
        super().__init__(f"design matrix has numerical rank {rank} < {p} columns")


class DimensionMismatch(SampleProjError, ValueError):
    pass


class DegenerateScores(SampleProjError, ValueError):
    pass


class InvalidScores(SampleProjError, ValueError):
    pass


class SampledRankDeficient(SampleProjError, ValueError):
    def __init__(self, rank, p):
        self.rank = rank
        self.p = p
        super().__init__(f"sampled rows have rank {rank} < {p}")


class EnumerationTooLarge(SampleProjError, ValueError):
    pass


class GenerationFailed(SampleProjError, RuntimeError):
    pass


class EmptyPlot(SampleProjError, ValueError):
    pass


class OptimalityViolated(SampleProjError, AssertionError):
    pass

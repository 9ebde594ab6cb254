"""Exception hierarchy shared by all modules."""


class NlsgError(Exception):
    """Base class for computational failures (CLI exit status 1)."""


class NonRegular(NlsgError):
    def __init__(self, vertex: int, degree: int, expected: int):
        super().__init__(f"vertex {vertex} has degree {degree}, expected {expected}")
        self.vertex = vertex


class NotInvolution(NlsgError):
    pass


class IncompatibleSizes(NlsgError):
    pass


class DegreeCapExceeded(NlsgError):
    pass


class DegreeTooSmall(NlsgError):
    pass


class EnumerationTooLarge(NlsgError):
    pass


class Disconnected(NlsgError):
    pass


class TriangleViolation(NlsgError):
    def __init__(self, triple: tuple[int, int, int]):
        i, j, k = triple
        super().__init__(f"d({i},{k}) > d({i},{j}) + d({j},{k})")
        self.triple = triple


class TooLarge(NlsgError):
    pass


class NoCodeFound(NlsgError):
    pass


class EmptyTruncation(NlsgError):
    pass


class NotCayley(NlsgError):
    pass


class PlanInfeasible(NlsgError):
    pass

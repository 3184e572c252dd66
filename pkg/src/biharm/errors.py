"""Exception hierarchy shared by the engine."""


class BiharmError(Exception):
    pass


# jets
class JetError(BiharmError, ArithmeticError):
    pass


class DivisionByZeroAtPoint(JetError, ZeroDivisionError):
    pass


class DomainError(JetError, ValueError):
    pass


class NonFiniteJet(JetError):
    pass


class IndexOutOfOrder(JetError, IndexError):
    pass


# geometry
class OutOfDomain(BiharmError, ValueError):
    pass


class SingularMetric(BiharmError):
    pass


class FrameNotOrthonormal(BiharmError):
    pass


# submersions / biharmonicity
class RankDeficient(BiharmError):
    pass


class StructureViolation(BiharmError):
    pass


class NotAdapted(BiharmError):
    pass


class InvalidSubmersion(BiharmError):
    def __init__(self, message, deviation=float("nan")):
        super().__init__(message)
        self.deviation = deviation


class ConfigError(BiharmError, ValueError):
    pass

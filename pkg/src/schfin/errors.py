"""Exception hierarchy shared by all modules."""


class SchfinError(ValueError):
    """Base class; carries an optional location (point, edge, ...)."""

    def __init__(self, message="", where=None):
        super().__init__(message)
        self.where = where


class BadShape(SchfinError):
    pass


class NotCommutative(SchfinError):
    pass


class NotAssociative(SchfinError):
    pass


class BadUnit(SchfinError):
    pass


class NotUnital(SchfinError):
    pass


class NotMultiplicative(SchfinError):
    pass


class NotPrime(SchfinError):
    pass


class NotEtale(SchfinError):
    pass


class SizeBound(SchfinError):
    pass


class TowerTooSmall(SchfinError):
    pass


class UnknownPoint(SchfinError):
    pass


class NotOpen(SchfinError):
    pass


class NotPoset(SchfinError):
    pass


class MixedCharacteristic(SchfinError):
    pass


class NotFunctorial(SchfinError):
    pass


class NotFiniteSpace(SchfinError):
    pass


class NotSchematic(SchfinError):
    pass


class NotSchematicMorphism(SchfinError):
    pass


class NotQcoh(SchfinError):
    pass


class NotPwConnected(SchfinError):
    pass


class NotWellConnected(SchfinError):
    pass


class NotConnected(SchfinError):
    pass


class NotSubgroup(SchfinError):
    pass


class NotMorphism(SchfinError):
    pass

class GrdError(ValueError):
    """Base class of all engine errors."""


class InputError(GrdError):
    """Malformed user input (exit code 2 on the command line)."""


class SchemeSyntaxError(InputError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class DuplicateNodeError(InputError):
    pass


class EmptySchemeError(InputError):
    pass


class UnknownCatalogEntryError(InputError):
    pass


class LaurentSyntaxError(InputError):
    pass


class DomainError(GrdError):
    """Well-formed input outside an operation's domain (exit code 3)."""


class NotGeneralizedRiemannError(DomainError):
    pass


class DegenerateElementError(DomainError):
    pass


class WindowCapExceededError(DomainError):
    pass


class CharacterSearchError(DomainError):
    pass

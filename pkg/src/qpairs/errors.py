"""Error taxonomy shared by every module.

DomainError   -> bad inputs / violated preconditions   (CLI exit 2)
ResourceError -> a configured cap would be exceeded    (CLI exit 3)
InvariantError-> an internal self-check failed          (CLI exit 4)
"""


class DomainError(ValueError):
    pass


class ResourceError(RuntimeError):
    pass


class InvariantError(RuntimeError):
    pass

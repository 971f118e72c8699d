class GreedyLabError(Exception):
    pass


class InvalidInput(GreedyLabError, ValueError):
    pass


class CapacityError(GreedyLabError):
    """An exhaustive enumeration would exceed its size guard."""

"""Exception types shared across the package."""


class DomainError(ValueError):
    """Bad atom index, infeasible point or malformed feasible set."""


class AtomFileError(DomainError):
    """A CSV atom file could not be parsed.

    ``row`` and ``column`` are 1-based positions in the file.
    """

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class ConfigError(ValueError):
    """Unknown problem/method name or invalid solver/experiment settings."""


class LineSearchError(RuntimeError):
    """Backtracking ran out of trials.

    Carries the last trial step and objective value so callers can see how
    far the search got. In practice this means the direction was not a
    descent direction (numerical noise) or the oracle is broken.
    """

    def __init__(self, message, last_step, last_value):
        super().__init__(message)
        self.last_step = last_step
        self.last_value = last_value

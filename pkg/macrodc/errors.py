from __future__ import annotations


class MacroDCError(Exception):
    """Base class for every error raised by the package."""


class DomainError(MacroDCError, ValueError):
    """An operation was called outside its documented domain."""


class ScenarioError(MacroDCError, ValueError):
    """
    A scenario or its inputs failed validation.

    Parameters
    ----------
    msg
        Human readable description.
    path
        Dotted path of the offending field, if known.
    line
        One-based line in the scenario file, if known.
    column
        One-based column in the scenario file, if known.
    """

    def __init__(
        self,
        msg: str,
        *,
        path: str | None = None,
        line: int | None = None,
        column: int | None = None,
    ) -> None:
        self.path = path
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if path:
            where.append(path)
        prefix = f"{'; '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{msg}")


class SimulationError(MacroDCError, RuntimeError):
    """The simulation reached a state it cannot continue from."""

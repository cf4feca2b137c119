"""Exception types shared across the package."""

from __future__ import annotations


class LampcoarseError(ValueError):
    """Base class for all library errors."""


class UnknownVertex(LampcoarseError, KeyError):
    pass


class DisconnectedGraph(LampcoarseError):
    pass


class CapExceeded(LampcoarseError):
    """A configured size or budget cap would be exceeded."""


class WindowError(LampcoarseError):
    """A finite window is too small to answer a question about the infinite graph."""


class CoveringError(LampcoarseError):
    """A covering fails a hypothesis needed by the nerve projection."""

    def __init__(self, message: str, edge=None):
        super().__init__(message)
        self.edge = edge


class NearCommonLeaf(LampcoarseError):
    """Two lamplighter vertices lie close to a common leaf, so no stringy witness exists."""

    def __init__(self, message: str, leaf=None):
        super().__init__(message)
        self.leaf = leaf


class RungError(LampcoarseError):
    """A rung of a ladder of leaves is not a square of leaves."""

    def __init__(self, message: str, rung: int):
        super().__init__(message)
        self.rung = rung

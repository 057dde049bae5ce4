"""Bundled example graphs."""

from importlib.resources import files


def path(name: str):
    """Filesystem path of a bundled graph, e.g. ``path("graph5.txt")``."""
    return files(__name__) / name

"""Two-transmon processor simulator running the four-object Grover search."""

__version__ = "0.1.0"

__all__ = ["__version__"]

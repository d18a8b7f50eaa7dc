"""Three-level atom in a cavity: dark-state ladder simulation and analytics."""

__version__ = "1.0"

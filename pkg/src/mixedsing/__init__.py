"""Newton-polyhedral non-degeneracy and link tools for real and mixed polynomial maps."""

__version__ = "0.1.0"

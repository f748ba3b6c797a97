"""Proof search, proof size and time-bounded Kolmogorov information at toy scale."""

from .machine import VERSION as MACHINE_VERSION

__version__ = "0.1.0"
__all__ = ["MACHINE_VERSION", "__version__"]

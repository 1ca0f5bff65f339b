"""Core functionality for the PA random join lab."""

# Version
__version__ = "0.1.0"

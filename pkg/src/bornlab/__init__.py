"""Mechanical checks of Born's rule, EPR correlations and the Kochen-Specker
contradiction behind the Free Will Theorem."""

__version__ = "0.1.0"

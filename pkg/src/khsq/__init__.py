"""Khovanov homology over F2 and two formulas for its second Steenrod square."""

__version__ = "0.1.0"

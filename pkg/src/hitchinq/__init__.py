"""Rational surface-group representations via twist flows.

Builds exact representations of closed surface groups into SL(n, Q) and
Sp(2k, Q), deforms them by generalized twist flows, and replaces each real
deformation by an exact rational one that is arbitrarily close.
"""

__version__ = "0.1.0"

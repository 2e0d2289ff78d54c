"""Symbolic parity games from linear processes and modal mu-calculus formulas."""

__version__ = "0.1.0"

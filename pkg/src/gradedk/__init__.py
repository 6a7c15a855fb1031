"""Graded K-theory invariants of graph algebras and shifted matrix algebras."""

__version__ = "0.1.0"

"""Desk-scale decoder stacks trained on synthlang corpora."""

__version__ = "0.1.0"

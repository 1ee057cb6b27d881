"""Verification toolkit for runs of consecutive primitive elements in F_q."""

__version__ = "0.1.0"

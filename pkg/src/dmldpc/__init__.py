"""LDPC codes from difference matrices and difference covering arrays."""

__version__ = "0.1.0"

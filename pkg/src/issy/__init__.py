"""Compiler and solver toolchain for the Issy specification language."""

__version__ = "0.1.0"

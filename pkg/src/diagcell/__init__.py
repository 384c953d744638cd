"""Exact workbench for Brauer-type diagram algebras and their homology."""

__version__ = "0.1.0"

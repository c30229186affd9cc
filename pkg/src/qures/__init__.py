"""Workbench for QU-resolution over quantified Boolean circuits."""

__version__ = "0.1.0"

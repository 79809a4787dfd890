"""Deterministic simulator and planning library for language-commanded
aerial fetch-and-handover missions."""

__version__ = "0.1.0"

"""Rescue-request triage, priority scoring, and hybrid dispatch scheduling."""

__version__ = "0.1.0"

"""Quantum gates as coined and continuous-time quantum walks on state graphs."""

__version__ = "0.1.0"

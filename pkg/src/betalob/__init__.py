"""Deterministic market-replay LOB backtester with scaled-beta market-making policies."""

__version__ = "0.1.0"

"""Emotion intensity regression, ordinal mapping and multi-label classification for tweets."""

__version__ = "0.1.0"

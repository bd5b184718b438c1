"""Preference evaluation, estimation, fine-tuning data and pricing simulation for decision agents."""

__version__ = "0.1.0"

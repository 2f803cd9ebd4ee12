"""Spin- and helicity-resolved pair creation in time-dependent electric pulses."""

__version__ = "0.1.0"

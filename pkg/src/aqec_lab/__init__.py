"""Stabilizer-circuit laboratory for approximate quantum error correction with
log-depth random encoders."""

__version__ = "0.1.0"

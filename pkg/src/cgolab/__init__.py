"""Symmetric tensor algebra and numerical checks for coefficient recovery in perturbed polyharmonic operators."""

__version__ = "0.1.0"

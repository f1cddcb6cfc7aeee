"""Thermodynamics of spin-boson models: closed forms and a finite-N oracle."""

__version__ = "0.1.0"

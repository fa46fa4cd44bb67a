"""Toroidal moments of a charged particle bound to an elliptic toroidal helix
in a uniform magnetic field."""

__version__ = "0.1.0"

"""Tangent spaces of p-adic eigenvarieties via overconvergent modular symbols."""

__version__ = "0.1.0"

"""Dirac eigenvalue laboratory source package."""

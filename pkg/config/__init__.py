"""Configuration package for the Dirac eigenvalue laboratory."""

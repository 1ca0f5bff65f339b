"""Failure tests: exact hypergeometric measures, bounds and Monte Carlo."""

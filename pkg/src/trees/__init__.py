"""Finite prefix-closed trees, density pruning and tree generation."""

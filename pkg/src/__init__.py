"""Desk-scale laboratory for the random join property of PA degrees."""

"""Test package for the code-cognitio project."""

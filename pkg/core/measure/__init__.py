"""Exact finite measure theory: spaces, set functions, polymeasures and interference."""

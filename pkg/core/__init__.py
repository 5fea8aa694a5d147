"""Core package for the grade-d measure toolkit."""

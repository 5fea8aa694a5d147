"""Test suite for the grade-d measure toolkit."""

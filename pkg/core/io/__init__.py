"""Artifact schemas, JSON serialization and seeded random generators."""

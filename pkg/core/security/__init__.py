"""Input validation and resource guards."""

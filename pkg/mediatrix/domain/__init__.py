"""Domain logic modules."""

"""Difference rings for nested sums and products."""

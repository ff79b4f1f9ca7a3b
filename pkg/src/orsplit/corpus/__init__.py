"""Benchmark programs shipped with the package."""

"""
Core modules for configuration, observability, and seeded randomness
"""

"""
Shared utilities: the exception hierarchy used across packages.
"""

"""
File-system helpers: data directory resolution and atomic writes.
"""

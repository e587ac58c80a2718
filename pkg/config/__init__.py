"""
Configuration module for the feature-leveling toolkit.

Contains environment-driven settings and the pydantic run/train schemas.
"""

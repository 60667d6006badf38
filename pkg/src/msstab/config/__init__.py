"""Configuration module for msstab"""

from .settings import Settings, get_settings

__all__ = ["Settings", "get_settings"]

"""Bundled run configurations and bound parameter files."""

from .loader import ConfigLibrary, bundled_config_dir, default_config_dir

__all__ = ["ConfigLibrary", "bundled_config_dir", "default_config_dir"]

"""
ConfigLibrary for discovering and resolving run configuration files.

Bare names such as `rosenbrock_adam` resolve against a `configs/` directory
in the working directory first and the copy shipped with the package second.
"""

from pathlib import Path
from typing import List, Union

CONFIG_SUFFIXES = (".cfg", ".params")


def bundled_config_dir() -> Path:
    return Path(__file__).parent


def default_config_dir() -> Path:
    local = Path.cwd() / "configs"
    return local if local.is_dir() else bundled_config_dir()


class ConfigLibrary:
    """
    Discovers *.cfg and *.params files in one directory.

    Usage:
        library = ConfigLibrary()
        path = library.resolve("rosenbrock_adam")
    """

    def __init__(self, config_dir: Union[str, Path, None] = None):
        self.config_dir = Path(config_dir) if config_dir else default_config_dir()

    def discover_files(self) -> List[Path]:
        """
        Sorted configuration files of the library directory.

        Raises:
            FileNotFoundError: If the directory doesn't exist
        """
        if not self.config_dir.is_dir():
            raise FileNotFoundError(f"Config directory not found: {self.config_dir}")
        return sorted(p for p in self.config_dir.iterdir() if p.suffix in CONFIG_SUFFIXES)

    def resolve(self, name: Union[str, Path]) -> Path:
        """
        An existing path is returned as is; otherwise `name`, `name.cfg`
        and `name.params` are tried inside the library directory.

        Raises:
            FileNotFoundError: If nothing matches
        """
        path = Path(name)
        if path.is_file():
            return path
        for candidate in [self.config_dir / path.name] + [self.config_dir / f"{path.name}{s}"
                                                          for s in CONFIG_SUFFIXES]:
            if candidate.is_file():
                return candidate
        raise FileNotFoundError(f"No configuration named {str(name)!r} (searched {self.config_dir})")

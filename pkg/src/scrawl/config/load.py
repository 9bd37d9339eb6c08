"""Load and process configuration files."""

from collections.abc import Iterable
from pathlib import Path
import tomllib
from typing import Any

from .merge import deep_merge


def load_single_config(configfile: str | Path) -> dict[str, Any]:
    """Load a single TOML config file and return its content.

    :param configfile: Path to the config file.
    :return: The loaded config as a dictionary.
    :raise FileNotFoundError: If the config file does not exist.
    :raise tomllib.TOMLDecodeError: If the config file is not valid TOML.
    """
    with Path(configfile).open("rb") as f:
        return tomllib.load(f)


def handle_config(
    user_path: Path | str | None,
    search_dirs: Iterable[str | Path],
    basenames: Iterable[str],
    default_config: dict[str, Any] | None = None,
) -> tuple[tuple[Path, ...] | None, dict[str, Any], bool]:
    """Return (config_files, config, from_defaults) for config file handling.

    An explicit ``user_path`` disables the directory search. Otherwise the
    first existing basename of every search directory is loaded and all of
    them are merged over the defaults, later directories winning.

    The returned configuration is the raw merged dictionary; it has not
    been validated.

    :param user_path: Path to the user-defined config file, if any.
    :param search_dirs: Directories to search, lowest priority first.
    :param basenames: Base filenames to look for in each directory.
    :param default_config: Table the found files are merged on top of.
    :return: A tuple containing:

        * the found config files, highest priority first, or None,
        * the merged configuration,
        * whether the defaults were used exclusively.
    """
    defaults = default_config or {}
    found_files: list[Path] = []
    found_configs: list[dict[str, Any]] = []

    if user_path:
        found_files.append(Path(user_path))
        found_configs.append(load_single_config(user_path))
    else:
        names = tuple(basenames)
        for search_dir in search_dirs:
            for basename in names:
                candidate = Path(search_dir) / basename
                if candidate.is_file():
                    found_files.append(candidate)
                    found_configs.append(load_single_config(candidate))
                    break

    if not found_files:
        return None, deep_merge(defaults), True

    return tuple(reversed(found_files)), deep_merge(defaults, *found_configs), False

"""Canonical text form of configuration tables.

The canonical form is flat TOML: one ``dotted.key = value`` line per leaf,
keys sorted, LF line endings, UTF-8. It is used for ``scrawl config dump``
and for the header of checkpoint files, so two equal configurations
always produce byte-identical text.
"""

from collections.abc import Iterator, Mapping
import re
import tomllib
from typing import Any

import tomlkit

_BARE_KEY = re.compile(r"[A-Za-z0-9_-]+")


def _key_segment(segment: str) -> str:
    if _BARE_KEY.fullmatch(segment):
        return segment
    return tomlkit.item(segment).as_string()


def iter_leaves(data: Mapping[str, Any], prefix: str = "") -> Iterator[tuple[str, Any]]:
    """Yield (dotted key, value) for every non-None leaf of a nested table.

    Key segments that are not bare TOML keys come out quoted.
    """
    for key, value in data.items():
        dotted = f"{prefix}.{_key_segment(str(key))}" if prefix else _key_segment(str(key))
        if isinstance(value, Mapping):
            yield from iter_leaves(value, dotted)
        elif value is not None:
            yield dotted, value


def dumps(data: Mapping[str, Any]) -> str:
    """Serialize a nested table into canonical text.

    :param data: Nested dictionary of TOML-compatible values. ``None`` leaves
        are skipped; empty tables disappear.
    :return: The canonical text, ending with a newline (empty string for
        an empty table).
    """
    lines = [
        f"{key} = {tomlkit.item(value).as_string()}"
        for key, value in sorted(iter_leaves(data), key=lambda leaf: leaf[0])
    ]
    return "".join(f"{line}\n" for line in lines)


def loads(text: str) -> dict[str, Any]:
    """Parse canonical text back into a nested dictionary.

    :raise tomllib.TOMLDecodeError: If the text is not valid TOML.
    """
    return tomllib.loads(text)

"""Merge nested configuration tables without modifying the inputs."""

from collections.abc import Mapping
from copy import deepcopy
from typing import Any


def deep_merge(*dcts: Mapping[str, Any]) -> dict[str, Any]:
    """Merge multiple dictionaries into a new one without modifying inputs.

    Later dictionaries win. Values that are mappings on both sides are
    merged recursively; everything else (lists included) is replaced.

    :param dcts: Sequence of dictionaries to merge, lowest priority first.
    :return: A new dictionary containing the merged values.
    """
    result: dict[str, Any] = {}
    for src in dcts:
        for key, value in src.items():
            existing = result.get(key)
            if isinstance(existing, Mapping) and isinstance(value, Mapping):
                result[key] = deep_merge(existing, value)
            else:
                result[key] = deepcopy(value)
    return result


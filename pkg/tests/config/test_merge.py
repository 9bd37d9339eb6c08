import pytest

from scrawl.config.merge import deep_merge


@pytest.mark.parametrize(
    "tables,expected",
    [
        ([], {}),
        ([{"a": 1}], {"a": 1}),
        ([{"a": 1}, {"a": 2}], {"a": 2}),
        ([{"a": {"b": 1, "c": 2}}, {"a": {"c": 3}}], {"a": {"b": 1, "c": 3}}),
        ([{"a": {"b": 1}}, {"a": 5}], {"a": 5}),
        ([{"a": 5}, {"a": {"b": 1}}], {"a": {"b": 1}}),
        # Lists are replaced, not concatenated
        ([{"a": [1, 2, 3]}, {"a": [4]}], {"a": [4]}),
        ([{"a": 1}, {"b": 2}, {"a": 3, "c": {"d": 4}}], {"a": 3, "b": 2, "c": {"d": 4}}),
    ],
)
def test_deep_merge(tables, expected):
    assert deep_merge(*tables) == expected


def test_deep_merge_does_not_modify_inputs():
    base = {"cnn": {"channels": [8, 16]}, "seed": 0}
    over = {"cnn": {"kernel": 5}}

    merged = deep_merge(base, over)
    merged["cnn"]["channels"].append(32)

    assert base == {"cnn": {"channels": [8, 16]}, "seed": 0}
    assert over == {"cnn": {"kernel": 5}}

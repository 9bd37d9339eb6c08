import numpy as np
import pytest

from scrawl.corpus.errors import CorpusError
from scrawl.corpus.glyphs import glyph_cell
from scrawl.corpus.sample import Split
from scrawl.corpus.synth import (
    BASELINE_TOP,
    MARGIN,
    NoiseParams,
    line_width,
    render_line,
    synth_corpus,
    synth_generate,
    synth_texts,
)
from scrawl.corpus.vocabulary import Vocabulary

CLEAN = NoiseParams(jitter=0, shear=0.0, sigma=0.0)


def test_line_width_is_a_grid_multiple():
    assert line_width(5) == 96
    assert all(line_width(n) % 16 == 0 for n in range(1, 30))


def test_clean_render_places_glyph_cells():
    pixels = render_line("lo", np.random.default_rng(0), CLEAN)
    assert pixels.shape == (64, 48)
    expected = np.ones((64, 48))
    expected[BASELINE_TOP : BASELINE_TOP + 16, MARGIN : MARGIN + 16][glyph_cell("l")] = 0.0
    expected[BASELINE_TOP : BASELINE_TOP + 16, MARGIN + 16 : MARGIN + 32][glyph_cell("o")] = 0.0
    np.testing.assert_array_equal(pixels, expected)


def test_jitter_moves_glyphs_horizontally_only():
    noise = NoiseParams(jitter=2, shear=0.0, sigma=0.0)
    tops, lefts = set(), set()
    for seed in range(20):
        rows, cols = np.nonzero(render_line("I", np.random.default_rng(seed), noise) == 0.0)
        tops.add(int(rows.min()))
        lefts.add(int(cols.min()))
    assert len(tops) == 1
    assert len(lefts) > 1


def test_noisy_render_stays_in_range():
    pixels = render_line("modern", np.random.default_rng(1))
    assert pixels.dtype == np.float32
    assert pixels.min() >= 0.0 and pixels.max() <= 1.0
    assert 0.0 < pixels.mean() < 1.0


def test_generate_is_determined_by_seed():
    first = synth_generate(7, 6)
    second = synth_generate(7, 6)
    assert [s.text for s in first] == [s.text for s in second]
    for a, b in zip(first, second, strict=True):
        np.testing.assert_array_equal(a.image.pixels, b.image.pixels)
    assert [s.text for s in synth_generate(8, 6)] != [s.text for s in first]


def test_generated_samples():
    samples = synth_generate(3, 20, lengths=(5, 10))
    texts = [s.text for s in samples]
    assert len(set(texts)) == 20
    vocab = Vocabulary.default()
    for sample in samples:
        assert 5 <= len(sample.text) <= 10
        assert set(sample.text) <= set("adehilmnorst")
        assert sample.image.height == 64
        assert sample.image.width == line_width(len(sample.text))
        assert sample.image.source_width == sample.image.width
        assert list(sample.transcript.token_ids) == vocab.encode(sample.text)
    assert samples[0].id == "synth-00000"


def test_duplicates_are_redrawn():
    texts = synth_texts(np.random.default_rng(0), 4, "ab", (1, 2))
    assert len(set(texts)) == 4


def test_capacity_is_checked():
    with pytest.raises(CorpusError, match="distinct"):
        synth_texts(np.random.default_rng(0), 3, "ab", (1, 1))


def test_characters_without_glyphs_are_rejected():
    with pytest.raises(CorpusError, match="no glyphs"):
        synth_generate(0, 2, charset="abé")


@pytest.mark.parametrize("kwargs", [{"jitter": -1}, {"jitter": 9}, {"shear": -0.1}, {"sigma": -1.0}])
def test_noise_params_are_validated(kwargs: dict):
    with pytest.raises(ValueError):
        NoiseParams(**kwargs)


def test_corpus_splits_are_disjoint():
    corpus = synth_corpus(5, {"train": 8, "validation": 2, "test": 3})
    assert corpus.counts() == {"train": 8, "validation": 2, "test": 3}
    texts = [s.text for split in corpus for s in corpus[split]]
    assert len(set(texts)) == 13
    assert [s.id for s in corpus[Split.TRAIN]] == sorted(s.id for s in corpus[Split.TRAIN])

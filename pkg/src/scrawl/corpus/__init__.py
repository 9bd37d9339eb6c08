"""Line images, transcripts, the output alphabet and synthetic corpora."""

from .errors import CorpusError
from .loader import load_corpus, load_corpus_dir, write_corpus
from .preprocess import preprocess_image
from .sample import Corpus, ImageLine, Sample, Split, Transcript
from .synth import NoiseParams, synth_corpus, synth_generate
from .vocabulary import Vocabulary, build_vocabulary

__all__ = [
    "Corpus",
    "CorpusError",
    "ImageLine",
    "NoiseParams",
    "Sample",
    "Split",
    "Transcript",
    "Vocabulary",
    "build_vocabulary",
    "load_corpus",
    "load_corpus_dir",
    "preprocess_image",
    "synth_corpus",
    "synth_generate",
    "write_corpus",
]

"""The fixed output alphabet: four special tokens and 95 printable characters."""

from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
import logging

from ..constants import (
    EOS_ID,
    PAD_ID,
    PRINTABLE_CHARS,
    SOS_ID,
    SPECIAL_TOKENS,
    UNK_ID,
)

log = logging.getLogger(__name__)

UNK_TEXT = "\ufffd"
"""How an UNK token is rendered when decoding ids back to text."""


@dataclass(frozen=True)
class Vocabulary:
    """Bidirectional mapping between characters and token ids.

    Ids 0 to 3 are PAD, SOS, EOS and UNK; characters follow in the order of
    :attr:`chars`. Characters outside the alphabet encode to UNK.

    .. code-block:: python

        >>> vocab = Vocabulary.default()
        >>> len(vocab)
        99
        >>> vocab.decode(vocab.encode("Hi!"))
        'Hi!'
    """

    chars: str = PRINTABLE_CHARS
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        duplicates = [c for c, count in Counter(self.chars).items() if count > 1]
        if duplicates:
            raise ValueError(f"vocabulary characters repeat: {duplicates}")
        offset = len(SPECIAL_TOKENS)
        object.__setattr__(
            self, "_index", {c: i + offset for i, c in enumerate(self.chars)}
        )

    @classmethod
    def default(cls) -> "Vocabulary":
        return cls(PRINTABLE_CHARS)

    def __len__(self) -> int:
        return len(SPECIAL_TOKENS) + len(self.chars)

    def __contains__(self, char: object) -> bool:
        return char in self._index

    def token_id(self, char: str) -> int:
        return self._index.get(char, UNK_ID)

    def encode(self, text: str) -> list[int]:
        """Map every character to its id (UNK for unknown ones), without SOS/EOS."""
        return [self.token_id(c) for c in text]

    def decode(self, ids: Iterable[int]) -> str:
        """Map ids back to text; PAD, SOS and EOS are dropped, UNK becomes U+FFFD."""
        offset = len(SPECIAL_TOKENS)
        out = []
        for i in ids:
            if i in (PAD_ID, SOS_ID, EOS_ID):
                continue
            if i == UNK_ID:
                out.append(UNK_TEXT)
            elif offset <= i < len(self):
                out.append(self.chars[i - offset])
            else:
                raise IndexError(f"token id {i} outside a vocabulary of {len(self)}")
        return "".join(out)

    def unknown_chars(self, text: str) -> set[str]:
        return {c for c in text if c not in self._index}


def build_vocabulary(transcripts: Sequence[str]) -> Vocabulary:
    """Return the fixed vocabulary and log characters it maps to UNK.

    The alphabet never depends on the transcripts; they are only scanned
    for characters outside it.
    """
    vocab = Vocabulary.default()
    unknown: Counter[str] = Counter()
    for text in transcripts:
        unknown.update(c for c in text if c not in vocab)
    if unknown:
        log.warning(
            "%d characters outside the alphabet will be read as UNK: %s",
            sum(unknown.values()),
            "".join(sorted(unknown)),
        )
    return vocab

"""Append-only CSV result files and the tab-separated transcript table."""

from collections.abc import Iterable, Sequence
import csv
from pathlib import Path


class TranscriptDialect(csv.Dialect):
    """``id<TAB>text`` lines; tabs, newlines and backslashes in text are escaped."""

    delimiter = "\t"
    quotechar = '"'
    escapechar = "\\"
    doublequote = False
    quoting = csv.QUOTE_NONE
    lineterminator = "\n"
    skipinitialspace = False


def append_rows(path: Path | str, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    """Append ``rows`` to a CSV file, writing ``header`` first when the file is new.

    :raises ValueError: If an existing file starts with a different header.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    exists = path.is_file() and path.stat().st_size > 0
    if exists:
        with path.open(newline="", encoding="utf-8") as fh:
            found = next(csv.reader(fh), [])
        if found != list(header):
            raise ValueError(f"{path}: header {found} does not match {list(header)}")

    with path.open("a", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if not exists:
            writer.writerow(header)
        writer.writerows(rows)
    return path


def read_rows(path: Path | str) -> list[dict[str, str]]:
    """Read a CSV file written by :func:`append_rows` into dictionaries."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def read_transcripts(path: Path | str) -> list[tuple[str, str]]:
    """Return ``(id, text)`` pairs in file order; blank lines are skipped.

    :raises ValueError: For a line without exactly one unescaped tab.
    """
    pairs = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh, TranscriptDialect), 1):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'id<TAB>text', got {len(row)} fields")
            pairs.append((row[0], row[1]))
    return pairs


def write_transcripts(path: Path | str, pairs: Iterable[tuple[str, str]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, TranscriptDialect).writerows(pairs)
    return path

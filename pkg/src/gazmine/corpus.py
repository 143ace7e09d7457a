"""Loading and indexing of raw unpunctuated character streams.

Documents are immutable sequences of Unicode codepoints.  Layout circles
(U+25CB) and space placeholders for lost glyphs stay in the stream; line
breaks carry no meaning in the source files and are removed outright.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

MARKER = "○"  # ○ layout circle
PLACEHOLDER = " "  # stands in for characters missing from Unicode

_LINE_BREAKS = {"\n", "\r", " ", " "}


class CorpusError(Exception):
    pass


def normalize_text(text: str) -> str:
    """Drop line-break codepoints, keep everything else in order."""
    return "".join(ch for ch in text if ch not in _LINE_BREAKS)


@dataclass(frozen=True)
class Document:
    id: str
    chars: str

    @property
    def length(self) -> int:
        return len(self.chars)

    def is_marker(self, i: int) -> bool:
        """True iff position i holds the layout circle ○.

        Space placeholders are ordinary (non-marker) characters.
        """
        if not 0 <= i < len(self.chars):
            raise IndexError(f"position {i} out of range for document "
                             f"{self.id!r} of length {len(self.chars)}")
        return self.chars[i] == MARKER


@dataclass
class Corpus:
    documents: list[Document] = field(default_factory=list)
    source_manifest: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._by_id = {d.id: d for d in self.documents}
        if len(self._by_id) != len(self.documents):
            raise CorpusError("duplicate document ids in corpus")

    def __iter__(self):
        return iter(self.documents)

    def __len__(self) -> int:
        return len(self.documents)

    def get(self, doc_id: str) -> Document:
        try:
            return self._by_id[doc_id]
        except KeyError:
            raise CorpusError(f"unknown document id {doc_id!r}") from None

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id


def document_from_text(doc_id: str, text: str) -> Document:
    return Document(id=doc_id, chars=normalize_text(text))


def load_corpus(root: str | Path) -> Corpus:
    """Load one Document per UTF-8 file under root (or the single file).

    Document ids are file stems.  Files are taken in sorted path order so
    repeated loads see the same corpus.
    """
    root = Path(root)
    if not root.exists():
        raise CorpusError(f"corpus path does not exist: {root}")
    if root.is_dir():
        paths = sorted(p for p in root.rglob("*") if p.is_file())
    else:
        paths = [root]

    documents = []
    manifest = {}
    for path in paths:
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise CorpusError(f"unreadable file {path}: {exc}") from exc
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorpusError(
                f"invalid UTF-8 in {path} at byte offset {exc.start}") from exc
        doc = document_from_text(path.stem, text)
        if doc.id in manifest:
            raise CorpusError(f"duplicate document id {doc.id!r} from {path}")
        documents.append(doc)
        manifest[doc.id] = str(path)
    return Corpus(documents=documents, source_manifest=manifest)


def save_corpus(corpus: Corpus, out_dir: str | Path) -> list[Path]:
    """Write each document's normalized char stream to <out_dir>/<id>.txt."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for doc in corpus:
        path = out_dir / f"{doc.id}.txt"
        path.write_text(doc.chars, encoding="utf-8")
        written.append(path)
    return written

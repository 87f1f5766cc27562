"""Data model, corpus ingestion, document embedding, and stream construction.

Documents are represented by the mean of the pre-trained word vectors of
their in-vocabulary tokens. Synthetic corpora draw class-conditional
Gaussian embeddings so class separability is controlled analytically.
"""

from __future__ import annotations

import logging
import string
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


class LabelSpace:
    """Ordered, immutable set of class names; class index = list position."""

    def __init__(self, classes):
        classes = tuple(classes)
        if len(classes) < 2:
            raise ValueError(f"need at least 2 classes, got {len(classes)}")
        if len(set(classes)) != len(classes):
            raise ValueError("class names must be unique")
        self.classes = classes
        self._index = {name: i for i, name in enumerate(classes)}

    def __len__(self):
        return len(self.classes)

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return isinstance(other, LabelSpace) and self.classes == other.classes

    def index(self, name: str) -> int:
        return self._index[name]

    def name(self, index: int) -> str:
        return self.classes[index]

    def __repr__(self):
        return f"LabelSpace({list(self.classes)!r})"


@dataclass
class Document:
    """One stream item: token list, ground-truth class index, dense embedding."""

    id: int
    tokens: list[str]
    true_class: int
    embedding: np.ndarray


class EmbeddingTable:
    """word -> vector map with a fixed dimension. Keys are lowercased at load."""

    def __init__(self, dimension: int, vectors: dict[str, np.ndarray] | None = None):
        self.dimension = dimension
        self.vectors = vectors if vectors is not None else {}

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, word):
        return word in self.vectors

    def get(self, word):
        return self.vectors.get(word)


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip leading/trailing punctuation."""
    out = []
    for raw in text.lower().split():
        tok = raw.strip(string.punctuation)
        if tok:
            out.append(tok)
    return out


def load_word_vectors(path) -> EmbeddingTable:
    """Read a word-vector text file: header "<count> <dim>", then one
    "<word> <v1> ... <vdim>" line per word.

    Words are lowercased (first occurrence wins). Lines whose numeric fields
    fail to parse are skipped with a log message; a line with the wrong number
    of components is a hard error.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected header '<count> <dim>', got {header!r}")
        try:
            declared_count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise ValueError(f"{path}: non-integer header fields {header!r}") from None
        if dim < 1:
            raise ValueError(f"{path}: vector dimension must be >= 1, got {dim}")
        vectors: dict[str, np.ndarray] = {}
        skipped = 0
        for lineno, line in enumerate(fh, start=2):
            fields = line.split()
            if not fields:
                skipped += 1
                logger.warning("%s:%d: blank line skipped", path, lineno)
                continue
            if len(fields) != dim + 1:
                raise ValueError(
                    f"{path}:{lineno}: expected {dim} components, got {len(fields) - 1}"
                )
            word = fields[0].lower()
            try:
                vec = np.array([float(v) for v in fields[1:]], dtype=np.float64)
            except ValueError:
                skipped += 1
                logger.warning("%s:%d: unparseable vector skipped", path, lineno)
                continue
            if word in vectors:
                skipped += 1
                logger.warning("%s:%d: duplicate word %r skipped", path, lineno, word)
                continue
            vectors[word] = vec
    if len(vectors) != declared_count - skipped:
        logger.warning(
            "%s: header declares %d words, loaded %d (%d skipped)",
            path, declared_count, len(vectors), skipped,
        )
    return EmbeddingTable(dim, vectors)


def write_word_vectors(table: EmbeddingTable, path) -> None:
    """Inverse of load_word_vectors; floats round-trip exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table)} {table.dimension}\n")
        for word, vec in table.vectors.items():
            fh.write(word + " " + " ".join(repr(float(v)) for v in vec) + "\n")


def embed_document(tokens, table: EmbeddingTable) -> np.ndarray:
    """Mean vector of the in-vocabulary tokens; zero vector if there are none.

    Out-of-vocabulary tokens are excluded from both the sum and the divisor.
    """
    vecs = [v for v in (table.get(t) for t in tokens) if v is not None]
    if not vecs:
        return np.zeros(table.dimension)
    return np.mean(vecs, axis=0)


def load_dataset(path, table: EmbeddingTable, labels: LabelSpace) -> list[Document]:
    """Read a tab-separated "<text>\\t<label>" file into embedded documents.

    Documents get sequential ids starting at 0. All offending lines (unknown
    labels, missing separators) are reported in one error.
    """
    docs: list[Document] = []
    bad: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            text, sep, label = line.rpartition("\t")
            if not sep:
                bad.append(f"line {lineno}: missing tab separator")
                continue
            label = label.strip()
            if label not in labels:
                bad.append(f"line {lineno}: unknown label {label!r}")
                continue
            tokens = tokenize(text)
            docs.append(
                Document(
                    id=len(docs),
                    tokens=tokens,
                    true_class=labels.index(label),
                    embedding=embed_document(tokens, table),
                )
            )
    if bad:
        raise ValueError(f"{path}: " + "; ".join(bad))
    if not docs:
        raise ValueError(f"{path}: no records")
    return docs


def generate_synthetic(
    labels: LabelSpace,
    per_class,
    dim: int,
    sep: float,
    seed,
    start_id: int = 0,
) -> list[Document]:
    """Class-conditional Gaussian corpus: class c has mean sep * e_c (one-hot
    direction), unit variance, empty token lists. Bit-reproducible under seed.
    """
    if len(per_class) != len(labels):
        raise ValueError(f"per_class has {len(per_class)} entries for {len(labels)} classes")
    if any(n < 0 for n in per_class):
        raise ValueError("per-class counts must be >= 0")
    if sep < 0:
        raise ValueError("separation must be >= 0")
    if dim < len(labels):
        raise ValueError(
            f"embedding dimension {dim} < {len(labels)} classes; one-hot class means need dim >= C"
        )
    rng = np.random.default_rng(seed)
    docs: list[Document] = []
    for c, count in enumerate(per_class):
        mean = np.zeros(dim)
        mean[c] = sep
        samples = mean + rng.standard_normal((count, dim))
        for row in samples:
            docs.append(Document(id=start_id + len(docs), tokens=[], true_class=c, embedding=row))
    return docs


class StreamSource:
    """Single-consumer iterator over a fixed document order."""

    def __init__(self, docs, seed):
        self._docs = list(docs)
        self.seed = seed
        self._cursor = 0

    def __len__(self):
        return len(self._docs)

    def __iter__(self):
        return self

    def __next__(self) -> Document:
        if self._cursor >= len(self._docs):
            raise StopIteration
        doc = self._docs[self._cursor]
        self._cursor += 1
        return doc


def shuffle_stream(docs, seed) -> StreamSource:
    """Seeded permutation of the document list as a one-pass stream."""
    if not docs:
        raise ValueError("cannot shuffle an empty document list")
    order = np.random.default_rng(seed).permutation(len(docs))
    return StreamSource([docs[i] for i in order], seed)


def synthetic_token(doc_id: int) -> str:
    return f"w{doc_id}"


def write_synthetic_corpus(docs, labels: LabelSpace, path) -> None:
    """Write synthetic documents in the dataset record format, one surrogate
    token per document. Pair with the table from `surrogate_table` so a
    reload reproduces every embedding exactly.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(f"{synthetic_token(doc.id)}\t{labels.name(doc.true_class)}\n")


def surrogate_table(docs) -> EmbeddingTable:
    """Embedding table mapping each document's surrogate token to its vector."""
    if not docs:
        raise ValueError("no documents")
    dim = len(docs[0].embedding)
    return EmbeddingTable(dim, {synthetic_token(d.id): np.asarray(d.embedding) for d in docs})

"""Text-side construction: tokenization, vocabulary, embedding tables, the
shared projection, and n-gram convolution vectors max-pooled over the text."""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .numeric import (
    ShapeError,
    Tensor,
    add_rowvec,
    concat_rows,
    matmul,
    max_rows,
    reshape,
    slice_rows,
    tanh_ew,
    transpose,
)

PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"
NGRAM_ORDERS = (2, 3, 4, 5)


class EmbeddingFileError(RuntimeError):
    """Malformed embedding file; the message carries path and line number."""


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip punctuation off token edges."""
    tokens = []
    for piece in text.lower().split():
        token = piece.strip(string.punctuation)
        if token:
            tokens.append(token)
    return tokens


@dataclass
class Vocabulary:
    """Dense token -> index map with reserved padding (0) and unknown (1) slots."""

    tokens: list[str]
    index: dict[str, int]

    @classmethod
    def from_tokens(cls, ordered: Iterable[str]) -> "Vocabulary":
        tokens = [PAD_TOKEN, UNK_TOKEN, *ordered]
        return cls(tokens=tokens, index={t: i for i, t in enumerate(tokens)})

    @property
    def pad_index(self) -> int:
        return 0

    @property
    def unk_index(self) -> int:
        return 1

    def lookup(self, token: str) -> int:
        return self.index.get(token, 1)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index


def build_vocab(corpus: Iterable[Sequence[str]], min_count: int = 1) -> Vocabulary:
    """Tokens seen at least ``min_count`` times, in first-appearance order."""
    counts: dict[str, int] = {}
    saw_any = False
    for doc in corpus:
        saw_any = True
        for token in doc:
            counts[token] = counts.get(token, 0) + 1
    if not saw_any:
        raise ValueError("build_vocab: empty corpus")
    kept = [t for t, c in counts.items()
            if c >= min_count and t not in (PAD_TOKEN, UNK_TOKEN)]
    return Vocabulary.from_tokens(kept)


def init_embeddings(vocab: Vocabulary, dim: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Fresh table, every row uniform in [-0.05, 0.05]."""
    return rng.uniform(-0.05, 0.05, size=(len(vocab), dim))


def load_embeddings(path, vocab: Vocabulary, rng: np.random.Generator,
                    dim: int | None = None) -> np.ndarray:
    """Embedding table from a text file of ``token v1 v2 ...`` lines.

    Rows for tokens present in the file are copied verbatim; every other row
    (padding and unknown included) stays at its uniform [-0.05, 0.05] draw.
    The random fill happens in one call before any copy, so file coverage
    never shifts the rng stream.
    """
    vectors: dict[str, np.ndarray] = {}
    width = dim
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split(" ")
            token, values = fields[0], fields[1:]
            if not token or not values:
                raise EmbeddingFileError(f"{path}:{lineno}: expected 'token v1 v2 ...'")
            try:
                vector = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise EmbeddingFileError(f"{path}:{lineno}: non-numeric value") from None
            if width is None:
                width = vector.size
            elif vector.size != width:
                raise EmbeddingFileError(
                    f"{path}:{lineno}: expected {width} dimensions, found {vector.size}")
            vectors[token] = vector
    if width is None:
        raise EmbeddingFileError(f"{path}: no vectors found")
    table = rng.uniform(-0.05, 0.05, size=(len(vocab), width))
    for token, vector in vectors.items():
        slot = vocab.index.get(token)
        if slot is not None and slot >= 2:
            table[slot] = vector
    return table


@dataclass
class Projection:
    """Shared affine map plus tanh taking embedding rows to feature rows."""

    weight: Tensor  # (embed_dim, feature_dim)
    bias: Tensor    # (feature_dim,)


@dataclass
class ConvFilterBank:
    """One filter and bias per n-gram order; output width is the feature dim."""

    filters: dict[int, tuple[Tensor, Tensor]]  # order -> (weight (d, n*d), bias (d,))

    def __post_init__(self):
        if tuple(sorted(self.filters)) != NGRAM_ORDERS:
            raise ValueError(f"filter bank must cover orders {NGRAM_ORDERS}, "
                             f"got {sorted(self.filters)}")


def project(rows: Tensor, proj: Projection) -> Tensor:
    """tanh(row @ weight + bias) applied to every embedding row."""
    return tanh_ew(add_rowvec(matmul(rows, proj.weight), proj.bias))


def ngram_features(projected: Tensor, bank: ConvFilterBank,
                   pad_row: Tensor | None = None) -> list[Tensor]:
    """One pooled vector per n-gram order.

    Each window of n consecutive projected rows is flattened, pushed through
    the order's filter with tanh, and the results are max-pooled over window
    positions. Texts shorter than n are right-padded with ``pad_row`` copies
    to form a single window.
    """
    if projected.ndim != 2:
        raise ShapeError("ngram_features", f"expected a row matrix, got {projected.shape}")
    rows, width = projected.shape
    pooled = []
    for order in NGRAM_ORDERS:
        weight, bias = bank.filters[order]
        if rows >= order:
            windows = [reshape(slice_rows(projected, p, p + order), (1, order * width))
                       for p in range(rows - order + 1)]
        else:
            if pad_row is None:
                raise ShapeError("ngram_features",
                                 f"{rows} rows need a pad row to form an order-{order} window")
            padded = concat_rows([projected] + [pad_row] * (order - rows))
            windows = [reshape(padded, (1, order * width))]
        stacked = windows[0] if len(windows) == 1 else concat_rows(windows)
        activations = tanh_ew(add_rowvec(matmul(stacked, transpose(weight)), bias))
        pooled.append(max_rows(activations))
    return pooled


def augment_features(projected: Tensor, ngram_vectors: Sequence[Tensor]) -> Tensor:
    """Stack the pooled n-gram vectors under the projected word rows."""
    width = projected.shape[1]
    extra = [reshape(v, (1, width)) for v in ngram_vectors]
    return concat_rows([projected, *extra])

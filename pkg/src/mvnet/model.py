"""Multi-view classifier: per-view soft attention over shared feature rows,
view composition with configurable linking, and a perceptron read-out.

Each of the V views selects its own attention-weighted sum of the feature
rows. The first and last views pass their selections through unchanged;
interior views combine their selection with earlier views ("full" links to
all earlier views, "chain" only to the previous one, "no-links" to none).
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .config import (
    TrainConfig,
    VARIANT_CHAIN,
    VARIANT_FULL,
    VARIANT_NO_LINKS,
)
from .data import LabeledDocument
from .features import (
    NGRAM_ORDERS,
    ConvFilterBank,
    Projection,
    Vocabulary,
    augment_features,
    ngram_features,
    project,
)
from .numeric import (
    Graph,
    ShapeError,
    Tensor,
    add,
    concat_rows,
    gather_rows,
    matmul,
    matvec,
    mul,
    softmax_vec,
    tanh_ew,
    transpose,
)


@dataclass
class SelectionHead:
    """Attention parameters for one view."""

    score_vector: Tensor   # (attention_dim,)
    row_transform: Tensor  # (attention_dim, feature_dim)


@dataclass
class ViewStack:
    """Combination matrices for the interior views, per linking variant."""

    variant: str
    matrices: list[Tensor]  # one per interior view, in view order; empty for no-links


@dataclass
class Classifier:
    out_weight: Tensor
    out_bias: Tensor
    hidden_weight: Tensor | None = None
    hidden_bias: Tensor | None = None
    dropout_rate: float = 0.0


@dataclass
class ViewBundle:
    """Per-document intermediates kept for analysis."""

    selections: list[Tensor]
    views: list[Tensor]
    attention: list[Tensor]


def attention_scores(head: SelectionHead, feature_rows: Tensor) -> Tensor:
    """One raw score per feature row: score_vector . tanh(row_transform @ row)."""
    hidden = tanh_ew(matmul(feature_rows, transpose(head.row_transform)))
    return matvec(hidden, head.score_vector)


def attention_weights(scores: Tensor) -> Tensor:
    return softmax_vec(scores)


def select(weights: Tensor, feature_rows: Tensor) -> Tensor:
    """Attention-weighted sum of the feature rows."""
    if weights.ndim != 1 or feature_rows.ndim != 2 \
            or weights.shape[0] != feature_rows.shape[0]:
        raise ShapeError("select", f"weights {weights.shape} do not match "
                                   f"rows {feature_rows.shape}")
    return matvec(transpose(feature_rows), weights)


def compose_views(selections: list[Tensor], stack: ViewStack) -> list[Tensor]:
    """Turn per-view selections into view vectors.

    The first and last views are their selections unchanged. Interior view i
    is tanh(W_i @ inputs) with no bias, where inputs concatenate the selection
    with every earlier view (full) or just the previous view (chain).
    """
    count = len(selections)
    if stack.variant == VARIANT_NO_LINKS or count <= 2:
        return list(selections)
    expected = count - 2
    if len(stack.matrices) != expected:
        raise ShapeError("compose_views",
                         f"{count} views need {expected} matrices, "
                         f"got {len(stack.matrices)}")
    views = [selections[0]]
    for position in range(2, count):  # 1-based interior view numbers
        selection = selections[position - 1]
        if stack.variant == VARIANT_FULL:
            inputs = concat_rows([*views, selection])
        elif stack.variant == VARIANT_CHAIN:
            inputs = concat_rows([views[-1], selection])
        else:
            raise ValueError(f"unknown variant {stack.variant!r}")
        views.append(tanh_ew(matvec(stack.matrices[position - 2], inputs)))
    views.append(selections[-1])
    return views


def classify(views: list[Tensor], classifier: Classifier,
             dropout_mask: np.ndarray | None = None) -> Tensor:
    """Concatenate the views and read out logits.

    ``dropout_mask`` (already inverted-scaled) multiplies the concatenated
    vector; pass None outside training.
    """
    stacked = views[0] if len(views) == 1 else concat_rows(views)
    if dropout_mask is not None:
        stacked = mul(stacked, stacked.graph.tensor(dropout_mask))
    if classifier.hidden_weight is not None:
        hidden = tanh_ew(add(matvec(classifier.hidden_weight, stacked),
                             classifier.hidden_bias))
        return add(matvec(classifier.out_weight, hidden), classifier.out_bias)
    return add(matvec(classifier.out_weight, stacked), classifier.out_bias)


def view_stack_param_count(views: int, view_dim: int, variant: str) -> int:
    """Scalar parameters used by the view-combination matrices alone."""
    if variant == VARIANT_NO_LINKS:
        return 0
    if variant == VARIANT_FULL:
        return sum(view_dim * (i * view_dim) for i in range(2, views))
    if variant == VARIANT_CHAIN:
        return max(0, views - 2) * view_dim * (2 * view_dim)
    raise ValueError(f"unknown variant {variant!r}")


def _uniform_limit(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def _init_matrix(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    limit = _uniform_limit(cols, rows)
    return rng.uniform(-limit, limit, size=(rows, cols))


def _init_vector(rng: np.random.Generator, size: int) -> np.ndarray:
    limit = _uniform_limit(size, 1)
    return rng.uniform(-limit, limit, size=size)


def init_parameters(config: TrainConfig, vocab_size: int, num_classes: int,
                    rng: np.random.Generator,
                    embedding: np.ndarray | None = None,
                    ) -> "OrderedDict[str, np.ndarray]":
    """All learnable arrays, keyed by name, in a fixed creation order.

    Weight matrices draw uniform from [-r, r] with r = sqrt(6 / (fan_in +
    fan_out)); biases start at zero; a missing embedding table is drawn
    uniform from [-0.05, 0.05].
    """
    config.validate()
    d = config.view_dim
    a = config.resolved_attention_dim()
    params: "OrderedDict[str, np.ndarray]" = OrderedDict()
    if embedding is not None:
        embedding = np.ascontiguousarray(embedding, dtype=np.float64)
        if embedding.shape != (vocab_size, config.embed_dim):
            raise ValueError(f"embedding shape {embedding.shape} does not match "
                             f"({vocab_size}, {config.embed_dim})")
        params["embedding"] = embedding.copy()
    else:
        params["embedding"] = rng.uniform(-0.05, 0.05, size=(vocab_size, config.embed_dim))
    params["projection.weight"] = _init_matrix(rng, config.embed_dim, d)
    params["projection.bias"] = np.zeros(d)
    if config.conv_features:
        for order in NGRAM_ORDERS:
            params[f"ngram{order}.filter"] = _init_matrix(rng, d, order * d)
            params[f"ngram{order}.bias"] = np.zeros(d)
    for i in range(1, config.views + 1):
        params[f"head{i}.row_transform"] = _init_matrix(rng, a, d)
        params[f"head{i}.score_vector"] = _init_vector(rng, a)
    if config.variant != VARIANT_NO_LINKS:
        per_view_width = {VARIANT_FULL: (lambda i: i * d),
                          VARIANT_CHAIN: (lambda i: 2 * d)}[config.variant]
        for i in range(2, config.views):
            params[f"view{i}.combine"] = _init_matrix(rng, d, per_view_width(i))
    joined = config.views * d
    if config.two_layer_classifier:
        hidden = config.resolved_hidden_dim()
        params["classifier.hidden_weight"] = _init_matrix(rng, hidden, joined)
        params["classifier.hidden_bias"] = np.zeros(hidden)
        params["classifier.out_weight"] = _init_matrix(rng, num_classes, hidden)
    else:
        params["classifier.out_weight"] = _init_matrix(rng, num_classes, joined)
    params["classifier.out_bias"] = np.zeros(num_classes)
    return params


@dataclass
class BoundMvn:
    """Graph leaves for every parameter, grouped into typed pieces."""

    leaves: "OrderedDict[str, Tensor]"
    embedding: Tensor
    projection: Projection
    conv: ConvFilterBank | None
    heads: list[SelectionHead]
    stack: ViewStack
    classifier: Classifier


class MvnModel:
    """Configuration, vocabulary, label count, and parameter arrays in one place."""

    def __init__(self, config: TrainConfig, vocab: Vocabulary, num_classes: int,
                 params: "OrderedDict[str, np.ndarray]"):
        config.validate()
        if num_classes < 2:
            raise ValueError(f"need at least 2 classes, got {num_classes}")
        self.config = config
        self.vocab = vocab
        self.num_classes = num_classes
        self.params = params

    @classmethod
    def create(cls, config: TrainConfig, vocab: Vocabulary, num_classes: int,
               rng: np.random.Generator,
               embedding: np.ndarray | None = None) -> "MvnModel":
        params = init_parameters(config, len(vocab), num_classes, rng, embedding)
        return cls(config, vocab, num_classes, params)

    def copy_params(self) -> "OrderedDict[str, np.ndarray]":
        return OrderedDict((k, v.copy()) for k, v in self.params.items())

    def bind(self, graph: Graph, leaves=None) -> BoundMvn:
        """Create one leaf per parameter array on the given graph.

        A premade name -> leaf mapping (covering every parameter) can be
        passed instead, which gradient checkers use to own the leaves.
        """
        cfg = self.config
        if leaves is None:
            leaves = OrderedDict(
                (name, graph.tensor(array, requires_grad=True, name=name))
                for name, array in self.params.items())
        elif set(leaves) != set(self.params):
            raise ValueError("bind: leaf names do not match parameter names")
        heads = [SelectionHead(score_vector=leaves[f"head{i}.score_vector"],
                               row_transform=leaves[f"head{i}.row_transform"])
                 for i in range(1, cfg.views + 1)]
        if cfg.variant == VARIANT_NO_LINKS:
            matrices = []
        else:
            matrices = [leaves[f"view{i}.combine"] for i in range(2, cfg.views)]
        conv = None
        if cfg.conv_features:
            conv = ConvFilterBank({order: (leaves[f"ngram{order}.filter"],
                                           leaves[f"ngram{order}.bias"])
                                   for order in NGRAM_ORDERS})
        classifier = Classifier(
            out_weight=leaves["classifier.out_weight"],
            out_bias=leaves["classifier.out_bias"],
            hidden_weight=leaves.get("classifier.hidden_weight"),
            hidden_bias=leaves.get("classifier.hidden_bias"),
            dropout_rate=cfg.dropout,
        )
        return BoundMvn(
            leaves=leaves,
            embedding=leaves["embedding"],
            projection=Projection(weight=leaves["projection.weight"],
                                  bias=leaves["projection.bias"]),
            conv=conv,
            heads=heads,
            stack=ViewStack(variant=cfg.variant, matrices=matrices),
            classifier=classifier,
        )

    def forward(self, graph: Graph, doc: LabeledDocument, mode: str = "eval",
                dropout_mask: np.ndarray | None = None,
                bound: BoundMvn | None = None) -> tuple[Tensor, ViewBundle]:
        """Full pipeline for one document: embed, project, optionally add
        pooled n-gram rows, attend per view, compose views, classify.

        Returns the logits and the per-view intermediates. Dropout applies
        only in train mode and only through the given mask, so the caller
        owns all randomness.
        """
        if mode not in ("train", "eval"):
            raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
        if not doc.tokens:
            raise ValueError("forward: document has no tokens")
        if bound is None:
            bound = self.bind(graph)
        ids = [self.vocab.lookup(t) for t in doc.tokens]
        rows = gather_rows(bound.embedding, ids)
        projected = project(rows, bound.projection)
        if bound.conv is not None:
            pad_row = None
            if len(ids) < max(NGRAM_ORDERS):
                pad_embed = gather_rows(bound.embedding, [self.vocab.pad_index])
                pad_row = project(pad_embed, bound.projection)
            pooled = ngram_features(projected, bound.conv, pad_row)
            feature_rows = augment_features(projected, pooled)
        else:
            feature_rows = projected
        selections = []
        weights = []
        for head in bound.heads:
            w = attention_weights(attention_scores(head, feature_rows))
            weights.append(w)
            selections.append(select(w, feature_rows))
        views = compose_views(selections, bound.stack)
        mask = dropout_mask if mode == "train" else None
        logits = classify(views, bound.classifier, mask)
        return logits, ViewBundle(selections=selections, views=views, attention=weights)

    def predict(self, doc: LabeledDocument) -> int:
        logits, _ = self.forward(Graph(), doc)
        return int(np.argmax(logits.value))

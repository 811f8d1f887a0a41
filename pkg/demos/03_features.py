"""
From raw text to the feature matrix
===================================

A document becomes a matrix of feature rows in three steps: tokenize into a
vocabulary, project each word embedding through a shared tanh layer, and
append one max-pooled n-gram vector per filter order.
"""

import numpy as np

from mvnet.features import (
    ConvFilterBank,
    NGRAM_ORDERS,
    Projection,
    augment_features,
    build_vocab,
    init_embeddings,
    ngram_features,
    project,
    tokenize,
)
from mvnet.numeric import Graph

# Tokenization lowercases, splits on whitespace, and strips edge punctuation.
text = "The film, despite flaws, is genuinely moving!"
tokens = tokenize(text)
print(f"tokens: {tokens}")

# The vocabulary reserves index 0 for padding and 1 for unknown words.
vocab = build_vocab([tokens])
print(f"vocabulary ({len(vocab)} entries): {vocab.tokens}")
print(f"unseen word maps to slot {vocab.lookup('zebra')}")

# Embedding rows start as small uniform noise when no file is given.
rng = np.random.default_rng(0)
embed_dim, feature_dim = 10, 6
table = init_embeddings(vocab, embed_dim, rng)

graph = Graph()
rows = graph.tensor(table[[vocab.lookup(t) for t in tokens]])
projection = Projection(
    weight=graph.tensor(rng.normal(size=(embed_dim, feature_dim)) * 0.3),
    bias=graph.tensor(np.zeros(feature_dim)),
)
projected = project(rows, projection)
print(f"\nprojected word rows: {projected.shape}")

# One filter per n-gram order slides over the projected rows; max pooling
# keeps the strongest response per output coordinate.
bank = ConvFilterBank({
    order: (graph.tensor(rng.normal(size=(feature_dim, order * feature_dim)) * 0.2),
            graph.tensor(np.zeros(feature_dim)))
    for order in NGRAM_ORDERS
})
pooled = ngram_features(projected, bank)
for order, vector in zip(NGRAM_ORDERS, pooled):
    print(f"  {order}-gram vector: {np.array_str(vector.value, precision=3)}")

# The final feature matrix stacks word rows and pooled vectors: with orders
# 2-5 a document of H words always yields H + 4 rows.
features = augment_features(projected, pooled)
print(f"\nfeature matrix: {features.shape} "
      f"({len(tokens)} word rows + {len(NGRAM_ORDERS)} pooled rows)")

"""
Attention heads and linked views
================================

Each view selects its own soft mixture of the feature rows. Interior views
are then recombined from every earlier view, so later views can specialize
on what the earlier ones missed.
"""

import dataclasses

import numpy as np

from mvnet.config import TrainConfig, VARIANT_NO_LINKS
from mvnet.data import LabeledDocument
from mvnet.features import build_vocab
from mvnet.model import MvnModel
from mvnet.numeric import Graph

words = "the plot drags but the acting is superb".split()
doc = LabeledDocument(label=1, tokens=words, raw=" ".join(words))

config = TrainConfig(views=4, view_dim=6, embed_dim=8, conv_features=True, seed=3)
model = MvnModel.create(config, build_vocab([words]), 2, np.random.default_rng(3))

logits, bundle = model.forward(Graph(), doc)
print(f"document: '{doc.raw}'")
print(f"logits: {np.array_str(logits.value, precision=4)}")

# Each attention head produces a distribution over the feature rows: one
# row per token position plus the 4 pooled n-gram rows.
labels = [*words, "2-gram", "3-gram", "4-gram", "5-gram"]
print(f"\nattention over {len(labels)} feature rows, one row per view:")
for i, weights in enumerate(bundle.attention, start=1):
    top = int(np.argmax(weights.value))
    shown = " ".join(f"{w:.2f}" for w in weights.value)
    print(f"  view {i}: [{shown}]  peak on '{labels[top]}'")
    assert abs(weights.value.sum() - 1.0) < 1e-9

# The first and last views pass their selections through unchanged; the
# interior views are tanh transforms of everything before them.
for i, (view, selection) in enumerate(zip(bundle.views, bundle.selections), start=1):
    same = np.array_equal(view.value, selection.value)
    kind = "selection passed through" if same else "recombined from earlier views"
    print(f"view {i}: {kind}")

# Without the links every view is just its own selection.
unlinked = MvnModel(dataclasses.replace(config, variant=VARIANT_NO_LINKS),
                    model.vocab, model.num_classes, model.copy_params())
_, bundle = unlinked.forward(Graph(), doc)
all_same = all(np.array_equal(v.value, s.value)
               for v, s in zip(bundle.views, bundle.selections))
print(f"\nno-links variant: every view equals its selection -> {all_same}")

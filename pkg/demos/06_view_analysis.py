"""
What did each view learn?
=========================

Two diagnostics: a Gaussian naive Bayes probe per view (how well does that
view's vector alone separate the classes?) and a sweep over view counts.
"""

import dataclasses

import numpy as np

from mvnet import TrainConfig, build_model, evaluate, fit, keyword_corpus
from mvnet.analysis import (
    class_f_measures,
    extract_view_representations,
    nb_predict,
    nb_train,
    view_sweep,
)

train, dev, test = keyword_corpus(train_size=400, dev_size=100, test_size=100, seed=1)
config = TrainConfig(views=4, view_dim=12, embed_dim=12, batch_size=25,
                     dropout=0.0, lr_scale=1.0, max_epochs=5, patience=5,
                     conv_features=False, seed=1)

model = build_model(config, train)
fit(model, train, dev, config)
print(f"trained: test accuracy {evaluate(model, test).accuracy:.3f}")

# Freeze the model, read out each document's view vectors, and fit one
# probe per view. High F1 from a single view means that view alone carries
# the class signal.
probe_train = extract_view_representations(model, train)
probe_test = extract_view_representations(model, test)
classes = model.num_classes
print(f"\nper-view probe F1 ({config.views} views x {classes} classes):")
for i in range(config.views):
    probe = nb_train(probe_train.view(i), probe_train.labels, classes)
    predictions = [nb_predict(probe, x)[0] for x in probe_test.view(i)]
    f1 = class_f_measures(predictions, probe_test.labels, classes)
    print(f"  view {i + 1}: {np.array_str(f1, precision=3)}")

# The sweep retrains from scratch at each view count with everything else
# held fixed.
print("\naccuracy by view count:")
rows = view_sweep(dataclasses.replace(config, max_epochs=3),
                  [1, 2, 4], train, dev, test)
for row in rows:
    print(f"  V={row.views}: dev {row.dev_accuracy:.3f}, test {row.test_accuracy:.3f}")

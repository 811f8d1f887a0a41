"""
Generating and inspecting synthetic classification data
========================================================

Builds the two corpora the test suite trains on: a learnable keyword task
and a pure-noise memorization task, both written in the one-line-per-example
dataset format.
"""

import tempfile
from pathlib import Path

from mvnet import keyword_corpus, load_dataset, random_label_corpus, save_dataset

# Four classes; each document is 10-20 noise words with a few class-specific
# keywords mixed in. The same seed always yields the same corpus.
train, dev, test = keyword_corpus(num_classes=4, train_size=2000, dev_size=400,
                                  test_size=400, seed=0)
print(f"splits: {len(train)} train / {len(dev)} dev / {len(test)} test")
print("first training document:")
print(f"  label  {train[0].label}")
print(f"  tokens {' '.join(train[0].tokens)}")

# Datasets are plain text: an integer label, a tab, then the raw text.
out_dir = Path(tempfile.mkdtemp(prefix="mvnet-demo-"))
path = out_dir / "train.tsv"
save_dataset(path, train)
print(f"\nwrote {path}")
with open(path, encoding="utf-8") as handle:
    for line in [next(handle) for _ in range(3)]:
        print(f"  {line.rstrip()}")

# Loading reports how many malformed lines were skipped (zero here).
docs, malformed = load_dataset(path)
print(f"reloaded {len(docs)} documents, {malformed} malformed lines")

# The memorization corpus assigns labels independently of the text, so the
# only way to fit it is to memorize individual documents.
noise = random_label_corpus(size=50, num_classes=4, seed=0)
print(f"\nmemorization corpus: {len(noise)} documents, "
      f"labels {sorted({d.label for d in noise})}")
print(f"  example: label {noise[0].label}, text '{noise[0].raw}'")

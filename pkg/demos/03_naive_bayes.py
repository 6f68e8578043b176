"""
Training the Bernoulli Naive-Bayes classifier
=============================================

Feature sets from labelled contexts train a two-class Bernoulli model with
additive smoothing. A prediction reports the label, the per-class log
scores and a confidence.
"""

import math
import tempfile
from pathlib import Path

from citesent.bayes import LabeledExample, load_model, save_model, train
from citesent.ingest import SentimentLabel
from citesent.lexicon import Feature

I, II = SentimentLabel.TypeI, SentimentLabel.TypeII
good, bad, however = Feature("POS", "good"), Feature("NEG", "bad"), Feature("NEGINC", "however")

examples = [
    LabeledExample(frozenset({good}), I),
    LabeledExample(frozenset({good, however}), I),
    LabeledExample(frozenset({bad, however}), II),
]

# %%
# With ``alpha = 1`` a feature seen in one of two TypeI examples gets
# probability (1 + 1) / (2 + 2) = 0.5 for that class.
model = train(examples, alpha=1.0)
for f in model.vocabulary:
    probs = {c.value: round(math.exp(model.log_cond[f][c][0]), 3) for c in model.classes}
    print(f"{str(f):<16}", probs)

# %%
# Absent features count too: a Bernoulli model scores both presence and absence.
for vector in (frozenset({good}), frozenset({bad}), frozenset(), frozenset({Feature("POS", "novel")})):
    pred = model.predict(vector)
    print(sorted(map(str, vector)), "->", pred.label.value, f"confidence {pred.confidence:.3f}")

# %%
# Models are saved as JSON with every number written to 17 significant
# digits, so a reload predicts identically.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "model.json"
    save_model(model, path)
    assert load_model(path).predict({good}) == model.predict({good})
    print()
    print(path.read_text()[:300], "...")

"""Bernoulli Naive Bayes over binary lexicon features.

Parameters with additive smoothing ``alpha`` and ``n`` training examples::

    prior(c)  = (count(c) + alpha) / (n + alpha * |classes|)
    p(f | c)  = (count(f present in c) + alpha) / (count(c) + 2 * alpha)

and a vector ``x`` scores, over the training vocabulary,

    score(c)  = log prior(c) + sum_f [log p(f|c) if f in x else log(1 - p(f|c))]
"""

from __future__ import annotations

import json
import math
import os
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

from .errors import ArgumentError, DegenerateTraining, ModelParseError
from .ingest import SentimentLabel
from .lexicon import Feature

CLASSES = (SentimentLabel.TypeI, SentimentLabel.TypeII)
MODEL_VERSION = 1
# Scores this close are equal in exact arithmetic up to rounding of the
# individual log terms; they go to the tie-break class.
TIE_TOLERANCE = 1e-12


class LabeledExample(NamedTuple):
    vector: frozenset
    label: SentimentLabel


@dataclass(frozen=True)
class Prediction:
    label: SentimentLabel
    log_posterior: Mapping[SentimentLabel, float]
    confidence: float


@dataclass(frozen=True)
class NBModel:
    alpha: float
    vocabulary: tuple
    log_prior: Mapping[SentimentLabel, float]
    # feature -> class -> (log p, log(1 - p))
    log_cond: Mapping[object, Mapping[SentimentLabel, tuple[float, float]]]
    classes: tuple = CLASSES
    tie_break: SentimentLabel = SentimentLabel.TypeI

    def __post_init__(self):
        # every feature absent: the baseline that present features adjust
        absent = {c: math.fsum(self.log_cond[f][c][1] for f in self.vocabulary) for c in self.classes}
        object.__setattr__(self, "_absent_total", absent)
        # what a present feature adds on top of that baseline, per class
        shift = {f: tuple(row[c][0] - row[c][1] for c in self.classes) for f, row in self.log_cond.items()}
        object.__setattr__(self, "_present_shift", shift)

    def scores(self, vector: Iterable) -> dict[SentimentLabel, float]:
        shift = self._present_shift
        if not isinstance(vector, (set, frozenset)):
            vector = set(vector)
        present = [shift[f] for f in vector if f in shift]
        out = {}
        for i, c in enumerate(self.classes):
            terms = [self.log_prior[c], self._absent_total[c]]
            terms.extend(row[i] for row in present)
            out[c] = math.fsum(terms)
        return out

    def predict(self, vector: Iterable) -> Prediction:
        return predict(self, vector)


def train(examples: Iterable[LabeledExample], alpha: float = 1.0,
          tie_break: SentimentLabel = SentimentLabel.TypeI) -> NBModel:
    if not alpha > 0 or math.isinf(alpha):
        raise ArgumentError(f"alpha must be a positive finite number, got {alpha!r}")
    examples = list(examples)
    class_counts = Counter(ex.label for ex in examples)
    missing = [c.value for c in CLASSES if class_counts[c] == 0]
    if missing:
        raise DegenerateTraining(f"no training examples of class {', '.join(missing)}")
    feature_counts: dict[object, Counter] = {}
    for ex in examples:
        for f in set(ex.vector):
            feature_counts.setdefault(f, Counter())[ex.label] += 1

    n = len(examples)
    log_prior = {c: math.log((class_counts[c] + alpha) / (n + alpha * len(CLASSES))) for c in CLASSES}
    vocabulary = tuple(sorted(feature_counts))
    log_cond = {}
    for f in vocabulary:
        per_class = {}
        for c in CLASSES:
            denom = class_counts[c] + 2 * alpha
            p = (feature_counts[f][c] + alpha) / denom
            not_p = (class_counts[c] - feature_counts[f][c] + alpha) / denom
            per_class[c] = (math.log(p), math.log(not_p))
        log_cond[f] = per_class
    return NBModel(alpha, vocabulary, log_prior, log_cond, CLASSES, tie_break)


def predict(model: NBModel, vector: Iterable) -> Prediction:
    scores = model.scores(vector)
    best = max(scores.values())
    slack = TIE_TOLERANCE * max(1.0, abs(best))
    tied = [c for c in model.classes if best - scores[c] <= slack]
    label = model.tie_break if model.tie_break in tied else tied[0]
    log_norm = best + math.log(math.fsum(math.exp(s - best) for s in scores.values()))
    return Prediction(label, scores, math.exp(scores[label] - log_norm))


# --------------------------------------------------------------------------
# persistence

def _num(x: float) -> str:
    return format(x, ".17g")


def model_to_dict(model: NBModel) -> dict:
    return {
        "format": "citesent-bernoulli-nb",
        "version": MODEL_VERSION,
        "alpha": _num(model.alpha),
        "tie_break": model.tie_break.value,
        "priors": {c.value: _num(model.log_prior[c]) for c in model.classes},
        "vocabulary": [str(f) for f in model.vocabulary],
        "conditionals": {
            str(f): {c.value: [_num(lp), _num(lnp)] for c, (lp, lnp) in model.log_cond[f].items()}
            for f in model.vocabulary
        },
    }


def model_from_dict(data: dict) -> NBModel:
    try:
        if data.get("version") != MODEL_VERSION:
            raise ModelParseError(f"unsupported model version {data.get('version')!r}")
        alpha = float(data["alpha"])
        log_prior = {SentimentLabel(k): float(v) for k, v in data["priors"].items()}
        vocabulary = tuple(Feature.parse(s) for s in data["vocabulary"])
        log_cond = {}
        for f in vocabulary:
            row = data["conditionals"][str(f)]
            log_cond[f] = {SentimentLabel(k): (float(v[0]), float(v[1])) for k, v in row.items()}
        if set(log_prior) != set(CLASSES) or any(set(r) != set(CLASSES) for r in log_cond.values()):
            raise ModelParseError("model must cover exactly classes I and II")
        tie_break = SentimentLabel(data.get("tie_break", "I"))
    except ModelParseError:
        raise
    except (KeyError, TypeError, ValueError, IndexError, ArgumentError, AttributeError) as exc:
        raise ModelParseError(f"corrupt model: {exc!r}") from exc
    return NBModel(alpha, vocabulary, log_prior, log_cond, CLASSES, tie_break)


def save_model(model: NBModel, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, ensure_ascii=False, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path: str | os.PathLike) -> NBModel:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelParseError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ModelParseError(f"{path}: expected a JSON object")
    return model_from_dict(data)

"""Precision/recall/F1 reporting and the three evaluation protocols.

* resubstitution: train and test on every labelled example;
* balanced windows: consecutive windows of TypeI examples, each paired with
  all TypeII examples and split 50/50 per class;
* Monte-Carlo sliding windows: the same over stride-shifted (or randomly
  sampled) windows, summarised by the mean accuracy.
"""

from __future__ import annotations

import enum
import json
import logging
import math
import random
import statistics
import warnings
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

from .bayes import LabeledExample, train
from .errors import ArgumentError
from .ingest import SentimentLabel

logger = logging.getLogger(__name__)

CLASSES = (SentimentLabel.TypeI, SentimentLabel.TypeII)

# Type I ranges of the reference balanced-window experiment, kept verbatim
PAPER_BALANCED_WINDOWS = ((0, 21), (22, 43), (44, 65), (66, 87), (88, 109), (110, 125))


class UndefinedMetricWarning(UserWarning):
    """A metric had a zero denominator and was reported as 0."""


def _check_count(name: str, value) -> None:
    if value < 0:
        raise ArgumentError(f"{name} must be >= 0, got {value}")


def _ratio(num: float, den: float) -> tuple[float, bool]:
    if den == 0:
        return 0.0, True
    return num / den, False


def precision(tp: int, fp: int) -> float:
    _check_count("tp", tp)
    _check_count("fp", fp)
    value, undefined = _ratio(tp, tp + fp)
    if undefined:
        warnings.warn("precision undefined (no predicted positives), reported as 0",
                      UndefinedMetricWarning, stacklevel=2)
    return value


def recall(tp: int, fn: int) -> float:
    _check_count("tp", tp)
    _check_count("fn", fn)
    value, undefined = _ratio(tp, tp + fn)
    if undefined:
        warnings.warn("recall undefined (no relevant instances), reported as 0",
                      UndefinedMetricWarning, stacklevel=2)
    return value


def _f1(p: float, r: float) -> tuple[float, bool]:
    return _ratio(2 * p * r, p + r)


def f1(p: float, r: float) -> float:
    """Harmonic mean of precision and recall."""
    for name, v in (("precision", p), ("recall", r)):
        if not 0.0 <= v <= 1.0:
            raise ArgumentError(f"{name} must lie in [0, 1], got {v}")
    value, undefined = _f1(p, r)
    if undefined:
        warnings.warn("F1 undefined (precision + recall = 0), reported as 0",
                      UndefinedMetricWarning, stacklevel=2)
    return value


@dataclass(frozen=True)
class ConfusionCounts:
    tp: Mapping[SentimentLabel, int]
    fp: Mapping[SentimentLabel, int]
    fn: Mapping[SentimentLabel, int]
    correct: int
    total: int

    @classmethod
    def from_labels(cls, y_true: Sequence[SentimentLabel], y_pred: Sequence[SentimentLabel]):
        if len(y_true) != len(y_pred):
            raise ArgumentError("y_true and y_pred differ in length")
        tp = {c: 0 for c in CLASSES}
        fp = {c: 0 for c in CLASSES}
        fn = {c: 0 for c in CLASSES}
        for t, p in zip(y_true, y_pred):
            if t == p:
                tp[t] += 1
            else:
                fp[p] += 1
                fn[t] += 1
        return cls(tp, fp, fn, sum(tp.values()), len(y_true))

    def support(self, c: SentimentLabel) -> int:
        return self.tp[c] + self.fn[c]


@dataclass(frozen=True)
class ClassRow:
    label: str
    precision: float
    recall: float
    f1: float
    support: int
    undefined: tuple[str, ...] = ()


def weighted_average(rows: Sequence[ClassRow], label: str = "avg / total") -> ClassRow:
    """Support-weighted mean of each metric."""
    if not rows:
        raise ArgumentError("no rows to average")
    total = sum(r.support for r in rows)
    if total <= 0:
        raise ArgumentError("total support is zero")

    def mean(attr):
        return math.fsum(getattr(r, attr) * r.support for r in rows) / total

    return ClassRow(label, mean("precision"), mean("recall"), mean("f1"), total)


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[ClassRow, ...]
    average: ClassRow
    accuracy: float

    @classmethod
    def from_counts(cls, counts: ConfusionCounts) -> "EvalReport":
        rows = []
        for c in CLASSES:
            p, p_undef = _ratio(counts.tp[c], counts.tp[c] + counts.fp[c])
            r, r_undef = _ratio(counts.tp[c], counts.tp[c] + counts.fn[c])
            f, f_undef = _f1(p, r)
            flags = tuple(name for name, bad in (("precision", p_undef), ("recall", r_undef),
                                                 ("f1", f_undef)) if bad)
            rows.append(ClassRow(f"Type {c.value}", p, r, f, counts.support(c), flags))
        if counts.total == 0:
            raise ArgumentError("cannot report on zero examples")
        return cls(tuple(rows), weighted_average(rows), counts.correct / counts.total)

    @classmethod
    def from_labels(cls, y_true, y_pred) -> "EvalReport":
        return cls.from_counts(ConfusionCounts.from_labels(y_true, y_pred))

    def to_dict(self) -> dict:
        return {"classes": [asdict(r) for r in self.rows], "average": asdict(self.average),
                "accuracy": self.accuracy}

    def render(self) -> str:
        lines = [f"{'Category':<14}{'Precision':>10}{'Recall':>8}{'F1-score':>10}{'Support':>9}"]
        for r in (*self.rows, self.average):
            lines.append(f"{r.label:<14}{r.precision:>10.2f}{r.recall:>8.2f}{r.f1:>10.2f}{r.support:>9d}")
        lines.append(f"{'Accuracy':<14}{self.accuracy:>10.2f}")
        return "\n".join(lines)


# --------------------------------------------------------------------------
# split plans

class Protocol(enum.Enum):
    Resubstitution = "resubstitution"
    BalancedWindows = "balanced-windows"
    MonteCarloSliding = "monte-carlo"


@dataclass(frozen=True)
class SplitPlan:
    protocol: Protocol
    window_size: int
    windows: tuple[tuple[int, int], ...]
    seed: int = 0
    diagnostics: tuple[str, ...] = ()


def _truncate(windows, type1_count: int) -> tuple[list[tuple[int, int]], list[str]]:
    kept, notes = [], []
    last = type1_count - 1
    for start, end in windows:
        if start > last:
            notes.append(f"window {start}-{end} lies beyond the {type1_count} TypeI examples, dropped")
        elif end > last:
            notes.append(f"window {start}-{end} truncated to {start}-{last} ({type1_count} TypeI examples)")
            kept.append((start, last))
        else:
            kept.append((start, end))
    for note in notes:
        logger.warning(note)
    return kept, notes


def make_resubstitution_plan(type1_count: int, seed: int = 0) -> SplitPlan:
    if type1_count < 1:
        raise ArgumentError("need at least one TypeI example")
    return SplitPlan(Protocol.Resubstitution, type1_count, ((0, type1_count - 1),), seed)


def make_balanced_windows(type1_count: int, type2_count: int, preset: str | None = None,
                          seed: int = 0) -> SplitPlan:
    """Consecutive TypeI windows, each to be paired with every TypeII example.

    Without a preset the windows are disjoint and ``type2_count`` wide; the
    last one is truncated if the TypeI range runs out. ``preset="paper"``
    uses the six reference ranges verbatim, truncating only where they
    exceed ``type1_count``.
    """
    if type2_count < 1:
        raise ArgumentError("need at least one TypeII example")
    if type1_count < 0:
        raise ArgumentError("type1_count must be >= 0")
    if preset == "paper":
        wanted = list(PAPER_BALANCED_WINDOWS)
        width = max(end - start + 1 for start, end in wanted)
    elif preset is None:
        width = type2_count
        wanted = [(s, s + width - 1) for s in range(0, type1_count, width)]
    else:
        raise ArgumentError(f"unknown preset {preset!r}")
    windows, notes = _truncate(wanted, type1_count)
    return SplitPlan(Protocol.BalancedWindows, width, tuple(windows), seed, tuple(notes))


def make_sliding_windows(type1_count: int, window_width: int, stride: int = 1, seed: int = 0) -> SplitPlan:
    """Inclusive windows ``[s, s + width - 1]`` for ``s = 0, stride, ...``."""
    if window_width < 1 or stride < 1:
        raise ArgumentError("window_width and stride must be >= 1")
    if window_width > type1_count:
        raise ArgumentError(f"window width {window_width} exceeds {type1_count} TypeI examples")
    windows = tuple((s, s + window_width - 1)
                    for s in range(0, type1_count - window_width + 1, stride))
    return SplitPlan(Protocol.MonteCarloSliding, window_width, windows, seed)


def sample_sliding_windows(type1_count: int, window_width: int, n_samples: int, seed: int = 0) -> SplitPlan:
    """Randomly placed windows of fixed width (starts drawn without replacement)."""
    if window_width < 1 or window_width > type1_count:
        raise ArgumentError(f"window width {window_width} invalid for {type1_count} TypeI examples")
    if n_samples < 1:
        raise ArgumentError("n_samples must be >= 1")
    starts = list(range(type1_count - window_width + 1))
    rng = random.Random(f"windows/{seed}")
    chosen = rng.sample(starts, min(n_samples, len(starts)))
    windows = tuple((s, s + window_width - 1) for s in chosen)
    return SplitPlan(Protocol.MonteCarloSliding, window_width, windows, seed)


# --------------------------------------------------------------------------
# protocols

@dataclass(frozen=True)
class WindowResult:
    index: int
    window: tuple[int, int]
    n_train: int
    n_test: int
    accuracy: float
    report: EvalReport
    y_true: tuple[SentimentLabel, ...] = field(repr=False, default=())
    y_pred: tuple[SentimentLabel, ...] = field(repr=False, default=())


@dataclass(frozen=True)
class ProtocolResult:
    plan: SplitPlan
    windows: tuple[WindowResult, ...]
    mean_accuracy: float
    overall: EvalReport
    split_fraction: float
    alpha: float
    diagnostics: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "protocol": self.plan.protocol.value,
            "seed": self.plan.seed,
            "window_size": self.plan.window_size,
            "split_fraction": self.split_fraction,
            "alpha": self.alpha,
            "windows": [{"index": w.index, "start": w.window[0], "end": w.window[1],
                         "n_train": w.n_train, "n_test": w.n_test, "accuracy": w.accuracy,
                         "report": w.report.to_dict()} for w in self.windows],
            "mean_accuracy": self.mean_accuracy,
            "overall": self.overall.to_dict(),
            "diagnostics": list(self.diagnostics),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def render(self) -> str:
        lines = [f"protocol: {self.plan.protocol.value}  seed: {self.plan.seed}"]
        if self.plan.protocol is not Protocol.Resubstitution:
            lines.append(f"{'No.':>4}  {'Train':>5}  {'Test':>5}  {'Window':>9}  Accuracy")
            for w in self.windows:
                lines.append(f"{w.index + 1:>4}  {w.n_train:>5}  {w.n_test:>5}  "
                             f"{w.window[0]:>4}-{w.window[1]:<4}  {w.accuracy:.0%}")
            lines.append(f"Average ({self.mean_accuracy:.0%})")
            lines.append("")
            lines.append("pooled over windows:")
        lines.append(self.overall.render())
        return "\n".join(lines)


def _split_class(items: list, fraction: float, rng: random.Random) -> tuple[list, list]:
    shuffled = list(items)
    rng.shuffle(shuffled)
    n_train = min(max(1, int(len(shuffled) * fraction)), len(shuffled) - 1)
    return shuffled[:n_train], shuffled[n_train:]


def run_protocol(examples_by_class: Mapping[SentimentLabel, Sequence], plan: SplitPlan,
                 split_fraction: float = 0.5, seed: int | None = None, alpha: float = 1.0) -> ProtocolResult:
    """Train and test one Naive-Bayes model per window of ``plan``.

    ``examples_by_class`` maps each label to its feature vectors in a fixed
    order; window ranges index the TypeI sequence. Each window's shuffle is
    seeded from ``(seed, window index)`` so results do not depend on the
    order windows are evaluated in.
    """
    if not 0.0 < split_fraction < 1.0:
        raise ArgumentError("split_fraction must lie in (0, 1)")
    if seed is not None and seed != plan.seed:
        plan = SplitPlan(plan.protocol, plan.window_size, plan.windows, seed, plan.diagnostics)
    type1 = list(examples_by_class.get(SentimentLabel.TypeI, ()))
    type2 = list(examples_by_class.get(SentimentLabel.TypeII, ()))
    notes = list(plan.diagnostics)
    results = []

    for index, (start, end) in enumerate(plan.windows):
        if start < 0 or end < start or end >= len(type1):
            notes.append(f"window {index} ({start}-{end}) outside the TypeI range, skipped")
            continue
        subset = type1[start:end + 1]
        if plan.protocol is Protocol.Resubstitution:
            data = ([LabeledExample(v, SentimentLabel.TypeI) for v in subset]
                    + [LabeledExample(v, SentimentLabel.TypeII) for v in type2])
            if not subset or not type2:
                notes.append(f"window {index}: resubstitution needs both classes, skipped")
                continue
            train_set = test_set = data
        else:
            if len(subset) < 2 or len(type2) < 2:
                notes.append(f"window {index} ({start}-{end}): a class has fewer than 2 examples, skipped")
                continue
            rng = random.Random(f"{plan.seed}/{index}")
            tr1, te1 = _split_class(subset, split_fraction, rng)
            tr2, te2 = _split_class(type2, split_fraction, rng)
            train_set = ([LabeledExample(v, SentimentLabel.TypeI) for v in tr1]
                         + [LabeledExample(v, SentimentLabel.TypeII) for v in tr2])
            test_set = ([LabeledExample(v, SentimentLabel.TypeI) for v in te1]
                        + [LabeledExample(v, SentimentLabel.TypeII) for v in te2])
        model = train(train_set, alpha)
        y_true = tuple(ex.label for ex in test_set)
        y_pred = tuple(model.predict(ex.vector).label for ex in test_set)
        report = EvalReport.from_labels(y_true, y_pred)
        results.append(WindowResult(index, (start, end), len(train_set), len(test_set),
                                    report.accuracy, report, y_true, y_pred))

    for note in notes[len(plan.diagnostics):]:
        logger.warning(note)
    if not results:
        raise ArgumentError("no window could be evaluated")
    pooled_true = [t for w in results for t in w.y_true]
    pooled_pred = [p for w in results for p in w.y_pred]
    return ProtocolResult(plan, tuple(results), statistics.fmean(w.accuracy for w in results),
                          EvalReport.from_labels(pooled_true, pooled_pred), split_fraction,
                          alpha, tuple(notes))

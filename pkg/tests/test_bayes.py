import json
import math
import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from citesent.bayes import (LabeledExample, load_model, model_from_dict, model_to_dict, predict,
                            save_model, train)
from citesent.errors import ArgumentError, DegenerateTraining, ModelParseError
from citesent.ingest import SentimentLabel
from citesent.lexicon import Feature

from nb_oracle import oracle_scores

I, II = SentimentLabel.TypeI, SentimentLabel.TypeII
GOOD, BAD = Feature("POS", "good"), Feature("NEG", "bad")


@pytest.fixture
def tiny_model():
    return train([LabeledExample(frozenset({GOOD}), I), LabeledExample(frozenset({BAD}), II)])


def test_smoothed_conditional_matches_hand_computation(tiny_model):
    # (1 + 1) / (1 + 2)
    assert math.exp(tiny_model.log_cond[GOOD][I][0]) == pytest.approx(2 / 3, abs=1e-15)
    assert math.exp(tiny_model.log_cond[GOOD][II][0]) == pytest.approx(1 / 3, abs=1e-15)
    assert math.exp(tiny_model.log_cond[GOOD][I][1]) == pytest.approx(1 / 3, abs=1e-15)


def test_priors_sum_to_one(tiny_model):
    assert math.fsum(math.exp(v) for v in tiny_model.log_prior.values()) == pytest.approx(1, abs=1e-12)


def test_predict_positive_vector(tiny_model):
    pred = predict(tiny_model, {GOOD})
    assert pred.label is I
    # enumerated by hand: I -> 1/2 * 2/3 * 2/3, II -> 1/2 * 1/3 * 1/3
    assert pred.log_posterior[I] == pytest.approx(math.log(2 / 9), abs=1e-12)
    assert pred.log_posterior[II] == pytest.approx(math.log(1 / 18), abs=1e-12)
    assert pred.confidence == pytest.approx(0.8, abs=1e-12)


def test_empty_vector_uses_prior_and_absent_mass():
    examples = [LabeledExample(frozenset({GOOD}), I), LabeledExample(frozenset(), I),
                LabeledExample(frozenset({BAD}), II)]
    model = train(examples)
    pred = predict(model, frozenset())
    expected = oracle_scores([(e.vector, e.label) for e in examples], frozenset())
    for c in (I, II):
        assert pred.log_posterior[c] == pytest.approx(expected[c], abs=1e-12)
    assert pred.label is max(expected, key=expected.get)


def test_unseen_features_are_ignored(tiny_model):
    assert predict(tiny_model, {Feature("POS", "novel")}) == predict(tiny_model, frozenset())


def test_tie_breaks_toward_type_one(tiny_model):
    # symmetric model and empty input: identical scores
    pred = predict(tiny_model, frozenset())
    assert pred.log_posterior[I] == pred.log_posterior[II]
    assert pred.label is I
    assert pred.confidence == pytest.approx(0.5)


@pytest.mark.parametrize("examples", [
    [],
    [LabeledExample(frozenset({GOOD}), I)],
    [LabeledExample(frozenset({GOOD}), II), LabeledExample(frozenset(), II)],
])
def test_degenerate_training(examples):
    with pytest.raises(DegenerateTraining):
        train(examples)


@pytest.mark.parametrize("alpha", [0, -1, float("nan"), float("inf")])
def test_bad_alpha(alpha):
    with pytest.raises(ArgumentError):
        train([LabeledExample(frozenset(), I), LabeledExample(frozenset(), II)], alpha=alpha)


def test_oracle_small_alpha_sweep():
    # fractional smoothing, all datasets of 2 features and up to 4 examples
    subsets = [frozenset(s) for s in ([], ["a"], ["b"], ["a", "b"])]
    kinds = [(v, c) for v in subsets for c in (I, II)]
    checked = 0
    for n in range(2, 5):
        for combo in product(kinds, repeat=n):
            if {c for _, c in combo} != {I, II}:
                continue
            model = train([LabeledExample(v, c) for v, c in combo], alpha=0.5)
            for vec in subsets:
                got = predict(model, vec).log_posterior
                want = oracle_scores(combo, vec, alpha_num=1, alpha_den=2)
                assert abs(got[I] - want[I]) < 1e-9 and abs(got[II] - want[II]) < 1e-9
                checked += 1
    assert checked > 1000


def _random_examples(rng, n_features=6, n=12):
    feats = [Feature("POS", f"w{i}") for i in range(n_features)]
    examples = [LabeledExample(frozenset(f for f in feats if rng.random() < 0.4), c)
                for c in [I, II] + [rng.choice([I, II]) for _ in range(n - 2)]]
    return feats, examples


def test_permutation_invariance():
    rng = random.Random(7)
    for _ in range(50):
        feats, examples = _random_examples(rng)
        shuffled = examples[:]
        rng.shuffle(shuffled)
        a, b = train(examples), train(shuffled)
        for _ in range(20):
            vec = frozenset(f for f in feats if rng.random() < 0.5)
            assert predict(a, vec) == predict(b, vec)


def test_feature_in_every_example_keeps_argmax_for_balanced_classes():
    # p(f|c) is then the same for both classes, so every score shifts equally
    rng = random.Random(11)
    everywhere = Feature("POS", "common")
    for _ in range(100):
        feats, examples = _random_examples(rng, n=10)
        labels = [I] * 5 + [II] * 5
        examples = [LabeledExample(e.vector, c) for e, c in zip(examples, labels)]
        base = train(examples)
        extended = train([LabeledExample(e.vector | {everywhere}, e.label) for e in examples])
        for _ in range(10):
            vec = frozenset(f for f in feats if rng.random() < 0.5)
            assert predict(base, vec).label is predict(extended, vec | {everywhere}).label
            assert predict(base, vec).label is predict(extended, vec).label


@given(n_with=st.integers(0, 6), n_without=st.integers(0, 6), n_other=st.integers(1, 4),
       alpha=st.floats(0.1, 5))
def test_monotone_in_type_two_evidence(n_with, n_without, n_other, alpha):
    if n_with + n_without == 0:
        n_without = 1
    f = Feature("NEG", "x")
    examples = ([LabeledExample(frozenset({f}), II)] * n_with
                + [LabeledExample(frozenset(), II)] * n_without
                + [LabeledExample(frozenset({f}), I)] * n_other)
    before = train(examples, alpha).log_cond[f][II][0]
    after = train(examples + [LabeledExample(frozenset({f}), II)], alpha).log_cond[f][II][0]
    assert after >= before


def test_conditionals_strictly_inside_unit_interval():
    rng = random.Random(3)
    _, examples = _random_examples(rng, n=20)
    model = train(examples, alpha=0.01)
    for row in model.log_cond.values():
        for log_p, log_not_p in row.values():
            assert log_p < 0 and log_not_p < 0


# --------------------------------------------------------------------------
# persistence

def test_round_trip_file(tmp_path, tiny_model):
    path = tmp_path / "model.json"
    save_model(tiny_model, path)
    loaded = load_model(path)
    assert loaded.vocabulary == tiny_model.vocabulary
    assert loaded.log_prior == tiny_model.log_prior
    assert loaded.log_cond == tiny_model.log_cond
    for vec in (frozenset(), {GOOD}, {BAD}, {GOOD, BAD}):
        assert predict(loaded, vec) == predict(tiny_model, vec)


def test_priors_rendered_with_17_significant_digits(tiny_model):
    data = model_to_dict(tiny_model)
    assert data["priors"]["I"] == format(math.log(0.5), ".17g")
    assert model_from_dict(json.loads(json.dumps(data))).log_prior[I] == tiny_model.log_prior[I]


def test_truncated_file(tmp_path, tiny_model):
    path = tmp_path / "model.json"
    save_model(tiny_model, path)
    text = path.read_text()
    path.write_text(text[: len(text) // 2])
    with pytest.raises(ModelParseError):
        load_model(path)


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(version=99),
    lambda d: d.pop("priors"),
    lambda d: d["conditionals"].clear(),
    lambda d: d["priors"].pop("II"),
    lambda d: d.update(vocabulary=["junk"]),
])
def test_corrupt_model(tiny_model, mutate):
    data = model_to_dict(tiny_model)
    mutate(data)
    with pytest.raises(ModelParseError):
        model_from_dict(data)

"""Sentiment dictionaries and binary lexicon-match features."""

from __future__ import annotations

import enum
import logging
import os
import re
import unicodedata
from dataclasses import dataclass
from importlib import resources
from typing import NamedTuple

from .context import split_sentences
from .errors import ArgumentError, LexiconFormatError

logger = logging.getLogger(__name__)

MAX_PHRASE_TOKENS = 3

_TOKEN = re.compile(r"[^\W_]+(?:['’\-][^\W_]+)*")


class Polarity(enum.Enum):
    Positive = "positive"
    Negative = "negative"


class LexiconKind(enum.Enum):
    Word = "word"
    IncrementerPhrase = "incrementer"


_TAGS = {
    (Polarity.Positive, LexiconKind.Word): "POS",
    (Polarity.Negative, LexiconKind.Word): "NEG",
    (Polarity.Positive, LexiconKind.IncrementerPhrase): "POSINC",
    (Polarity.Negative, LexiconKind.IncrementerPhrase): "NEGINC",
}


class Feature(NamedTuple):
    tag: str
    entry: str

    def __str__(self) -> str:
        return f"{self.tag}:{self.entry}"

    @classmethod
    def parse(cls, text: str) -> "Feature":
        tag, sep, entry = text.partition(":")
        if not sep or tag not in _TAGS.values() or not entry:
            raise ArgumentError(f"bad feature identifier {text!r}")
        return cls(tag, entry)


# presence set: a feature is 1 when in the set and 0 otherwise
FeatureVector = frozenset


def tokenize_words(sentence: str) -> list[str]:
    """Case-folded runs of letters and digits, allowing internal ``-`` and ``'``."""
    sentence = unicodedata.normalize("NFC", sentence)
    return [t.casefold() for t in _TOKEN.findall(sentence)]


@dataclass(frozen=True)
class Lexicon:
    polarity: Polarity
    kind: LexiconKind
    entries: frozenset[str]

    def __post_init__(self):
        if not self.entries:
            raise LexiconFormatError("lexicon has no entries")
        for entry in self.entries:
            n = len(entry.split(" "))
            if entry != entry.strip() or entry != entry.casefold() or not entry:
                raise LexiconFormatError(f"entry {entry!r} is not normalized")
            if self.kind is LexiconKind.IncrementerPhrase and n > MAX_PHRASE_TOKENS:
                raise LexiconFormatError(f"incrementer {entry!r} has {n} tokens (max {MAX_PHRASE_TOKENS})")

    @property
    def tag(self) -> str:
        return _TAGS[self.polarity, self.kind]

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, entry: str) -> bool:
        return entry in self.entries


def parse_lexicon_lines(lines, polarity: Polarity, kind: LexiconKind, source: str = "<lexicon>") -> Lexicon:
    entries = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = tokenize_words(line)
        if kind is LexiconKind.IncrementerPhrase:
            if len(tokens) > MAX_PHRASE_TOKENS:
                raise LexiconFormatError(
                    f"{source}:{lineno}: incrementer {line!r} has {len(tokens)} tokens "
                    f"(max {MAX_PHRASE_TOKENS})")
            if not tokens:
                raise LexiconFormatError(f"{source}:{lineno}: no tokens in {line!r}")
        elif len(tokens) != 1:
            logger.warning("%s:%d: word entry %r is not a single token, skipped", source, lineno, line)
            continue
        entries.add(" ".join(tokens))
    if not entries:
        raise LexiconFormatError(f"{source}: no entries")
    return Lexicon(polarity, kind, frozenset(entries))


def load_lexicon(path: str | os.PathLike, polarity: Polarity, kind: LexiconKind) -> Lexicon:
    with open(path, encoding="utf-8", errors="replace") as fh:
        return parse_lexicon_lines(fh, polarity, kind, source=os.fspath(path))


class LexiconSet(NamedTuple):
    positive: Lexicon
    negative: Lexicon
    positive_incrementers: Lexicon
    negative_incrementers: Lexicon


def _warn_overlap(a: Lexicon, b: Lexicon) -> None:
    shared = a.entries & b.entries
    if shared:
        logger.warning("%d entries appear in both %s and %s (e.g. %r)",
                       len(shared), a.tag, b.tag, sorted(shared)[0])


def make_lexicon_set(positive: Lexicon, negative: Lexicon, positive_incrementers: Lexicon,
                     negative_incrementers: Lexicon) -> LexiconSet:
    lexicons = LexiconSet(positive, negative, positive_incrementers, negative_incrementers)
    expected = [("POS", positive), ("NEG", negative), ("POSINC", positive_incrementers),
                ("NEGINC", negative_incrementers)]
    for tag, lex in expected:
        if lex.tag != tag:
            raise ArgumentError(f"expected a {tag} lexicon, got {lex.tag}")
    _warn_overlap(positive, negative)
    _warn_overlap(positive_incrementers, negative_incrementers)
    return lexicons


def load_lexicons(lex_pos=None, lex_neg=None, inc_pos=None, inc_neg=None) -> LexiconSet:
    """Load the four dictionaries; any path left as ``None`` uses the bundled default."""
    specs = [(lex_pos, "positive_words.txt", Polarity.Positive, LexiconKind.Word),
             (lex_neg, "negative_words.txt", Polarity.Negative, LexiconKind.Word),
             (inc_pos, "positive_incrementers.txt", Polarity.Positive, LexiconKind.IncrementerPhrase),
             (inc_neg, "negative_incrementers.txt", Polarity.Negative, LexiconKind.IncrementerPhrase)]
    loaded = []
    for path, default, polarity, kind in specs:
        if path is None:
            resource = resources.files("citesent.data").joinpath(default)
            text = resource.read_text(encoding="utf-8")
            loaded.append(parse_lexicon_lines(text.splitlines(), polarity, kind, source=default))
        else:
            loaded.append(load_lexicon(path, polarity, kind))
    return make_lexicon_set(*loaded)


def extract_features(corpus: str, lexicons: LexiconSet) -> frozenset[Feature]:
    """Presence set of lexicon entries found in ``corpus``.

    Incrementer phrases are matched as contiguous 1-3 token n-grams inside a
    single sentence; word lexica are matched token by token.
    """
    features = set()
    for sentence in split_sentences(corpus, case_sensitive=False):
        tokens = tokenize_words(sentence.text)
        for lex in (lexicons.positive, lexicons.negative):
            features.update(Feature(lex.tag, t) for t in tokens if t in lex.entries)
        for n in range(1, MAX_PHRASE_TOKENS + 1):
            grams = {" ".join(tokens[i:i + n]) for i in range(len(tokens) - n + 1)}
            for lex in (lexicons.positive_incrementers, lexicons.negative_incrementers):
                features.update(Feature(lex.tag, g) for g in grams if g in lex.entries)
    return frozenset(features)


def format_features(vector) -> list[str]:
    return [str(f) for f in sorted(vector)]


def parse_features(items) -> frozenset[Feature]:
    return frozenset(Feature.parse(s) for s in items)

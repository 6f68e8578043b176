"""Reference-section cropping, root reference lookup and in-text marker matching.

Three reference styles are supported:

========  ==================================  =======================
style     reference entry                     in-text marker
========  ==================================  =======================
IEEE      ``[1] Name Paper, Journal. Year``   ``[1]``, ``[1,2]``
APA       ``Name (Year). Paper, Journal``     ``Name (Year)``
AMA       ``1. Name Paper, Journal. Year``    ``[1]``, ``[1,2]``, ``1-2``
========  ==================================  =======================
"""

from __future__ import annotations

import enum
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

from .errors import (AmbiguousReference, ArgumentError, NoReferenceSection,
                     RootNotCited, StyleUndetected)

TITLE_SIMILARITY = 0.85


class ReferenceStyle(enum.Enum):
    IEEE = "IEEE"
    APA = "APA"
    AMA = "AMA"

    @property
    def numeric(self) -> bool:
        return self is not ReferenceStyle.APA


class AuthorYear(NamedTuple):
    surname: str
    year: int

    def __str__(self) -> str:
        return f"{self.surname}, {self.year}"


CitationKey = Union[int, AuthorYear]


def format_key(key: CitationKey) -> str:
    return str(key)


def parse_key(text: str, style: ReferenceStyle) -> CitationKey:
    text = text.strip()
    if style.numeric:
        if not text.isdigit() or int(text) < 1:
            raise ArgumentError(f"bad numeric citation key {text!r}")
        return int(text)
    surname, sep, year = text.rpartition(",")
    if not sep or not surname.strip() or not re.fullmatch(r"\s*\d{4}\s*", year):
        raise ArgumentError(f"bad author-year citation key {text!r}")
    return AuthorYear(surname.strip(), int(year))


@dataclass(frozen=True)
class RootReference:
    style: ReferenceStyle
    key: CitationKey
    entry_text: str
    entry_span: tuple[int, int]
    similarity: float = 1.0


@dataclass(frozen=True)
class CitationOccurrence:
    char_span: tuple[int, int]
    marker_text: str


# --------------------------------------------------------------------------
# reference section

_HEADING = re.compile(
    r"^[ \t]*(?:(?:\d{1,2}|[IVXLC]{1,6})\.?[ \t]+)?(?:references?|bibliography)[ \t]*:?[ \t]*$",
    re.IGNORECASE | re.MULTILINE)


def crop_reference_section(body: str) -> tuple[str, str]:
    """Split ``body`` at the last references heading.

    Returns ``(body_without_refs, crop_reference)``. The heading line itself
    belongs to neither part.
    """
    if not body:
        raise ArgumentError("empty text")
    last = None
    for last in _HEADING.finditer(body):
        pass
    if last is None:
        raise NoReferenceSection("no 'References' or 'Bibliography' heading found")
    end = last.end()
    if body.startswith("\r\n", end):
        end += 2
    elif body.startswith("\n", end):
        end += 1
    return body[:last.start()], body[end:]


# --------------------------------------------------------------------------
# style detection and entry segmentation

_UPPER = "A-ZÀ-ÖØ-ÞĀ-ž"
SURNAME = (rf"(?:(?:van|von|de|der|den|di|da|du|le|la)\s+)*[{_UPPER}]"
           r"[^\W\d_]*(?:['’\-][^\W\d_]+)*")
YEAR = r"(?:1[5-9]\d\d|20\d\d)[a-z]?"

_IEEE_START = re.compile(r"^[ \t]*\[(\d{1,4})\]", re.MULTILINE)
_AMA_START = re.compile(r"^[ \t]*(\d{1,3})\.[ \t]+(?=\S)", re.MULTILINE)
_APA_START = re.compile(
    rf"^[ \t]*(?P<surname>{SURNAME})(?:,[ \t]*(?:[{_UPPER}][^\W\d_]?\.[ \t\-]*)+|(?=[ \t]*\(\s*{YEAR}))",
    re.MULTILINE)
_PAREN_YEAR = re.compile(rf"\(\s*({YEAR})")


_CONTINUED = re.compile(r"(?:[,&;:]|\band)[ \t]*$")


def _apa_starts(crop: str) -> list[re.Match]:
    starts = []
    for m in _APA_START.finditer(crop):
        previous = crop[:m.start()].rstrip().rsplit("\n", 1)[-1]
        if _CONTINUED.search(previous):
            continue
        # year must appear on this line or the one after it (wrapped author lists)
        nl = crop.find("\n", m.end())
        nl2 = crop.find("\n", nl + 1) if nl >= 0 else -1
        window = crop[m.end(): nl2 if nl2 >= 0 else len(crop)]
        if _PAREN_YEAR.search(window):
            starts.append(m)
    return starts


def _entry_starts(crop: str, style: ReferenceStyle) -> list[re.Match]:
    if style is ReferenceStyle.IEEE:
        return list(_IEEE_START.finditer(crop))
    if style is ReferenceStyle.AMA:
        return list(_AMA_START.finditer(crop))
    return _apa_starts(crop)


def detect_style(crop_reference: str) -> ReferenceStyle:
    """Pick the style whose entry openings are most frequent.

    Ties are broken in the order IEEE, AMA, APA.
    """
    if not crop_reference.strip():
        raise ArgumentError("empty reference section")
    counts = {style: len(_entry_starts(crop_reference, style))
              for style in (ReferenceStyle.IEEE, ReferenceStyle.AMA, ReferenceStyle.APA)}
    best = max(counts, key=counts.get)   # dict order gives the tie-break
    if counts[best] == 0:
        raise StyleUndetected("no reference entry openings recognised")
    return best


@dataclass(frozen=True)
class ReferenceEntry:
    text: str
    span: tuple[int, int]
    opening: re.Match


def split_entries(crop_reference: str, style: ReferenceStyle) -> list[ReferenceEntry]:
    starts = _entry_starts(crop_reference, style)
    entries = []
    for i, m in enumerate(starts):
        begin = m.start()
        while crop_reference[begin] in " \t":
            begin += 1
        end = starts[i + 1].start() if i + 1 < len(starts) else len(crop_reference)
        text = crop_reference[begin:end].rstrip()
        entries.append(ReferenceEntry(text, (begin, begin + len(text)), m))
    return entries


# --------------------------------------------------------------------------
# title matching

def normalize_title(text: str) -> str:
    """Case-fold, drop punctuation and collapse whitespace."""
    text = unicodedata.normalize("NFKC", text)
    text = re.sub(r"(\w)-[ \t]*\r?\n[ \t]*(\w)", r"\1\2", text)   # hyphenated line breaks
    text = text.casefold()
    text = re.sub(r"[\W_]+", " ", text)
    return " ".join(text.split())


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1,
                               previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


def similarity(a: str, b: str) -> float:
    """Normalized Levenshtein similarity in [0, 1]."""
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))


def _edit_lower_bound(a: Counter, b: Counter) -> int:
    """Lower bound on the edit distance of two strings from their character counts."""
    surplus = sum((a - b).values())
    deficit = sum((b - a).values())
    return max(surplus, deficit)


def title_similarity(title_norm: str, entry_norm: str, threshold: float = TITLE_SIMILARITY) -> float:
    """Best similarity of the title against any token window of the entry.

    Containment scores 1.0. Windows that cannot reach ``threshold`` (judged by
    length and character counts, both lower bounds on the edit distance) are
    not scored, so the result is 0.0 for clearly unrelated entries.
    """
    if not title_norm:
        return 0.0
    if f" {title_norm} " in f" {entry_norm} ":
        return 1.0
    t_chars = Counter(title_norm)
    e_tokens = entry_norm.split()
    n = len(title_norm.split())
    best = 0.0
    for width in range(max(1, n - 2), n + 3):
        for start in range(0, max(1, len(e_tokens) - width + 1)):
            cand = " ".join(e_tokens[start:start + width])
            longest = max(len(cand), len(title_norm))
            floor = max(best, threshold)
            if 1.0 - abs(len(cand) - len(title_norm)) / longest < floor:
                continue
            if 1.0 - _edit_lower_bound(t_chars, Counter(cand)) / longest < floor:
                continue
            best = max(best, similarity(title_norm, cand))
    return best


def _parse_entry_key(entry: ReferenceEntry, style: ReferenceStyle) -> CitationKey:
    if style.numeric:
        return int(entry.opening.group(1))
    surname = entry.opening.group("surname")
    year = _PAREN_YEAR.search(entry.text) or re.search(rf"\b({YEAR})\b", entry.text)
    if year is None:
        raise RootNotCited(f"matched APA entry has no year: {entry.text[:80]!r}")
    return AuthorYear(" ".join(surname.split()), int(year.group(1)[:4]))


def find_root_reference(crop_reference: str, root_title: str, style: ReferenceStyle,
                        threshold: float = TITLE_SIMILARITY) -> RootReference:
    title_norm = normalize_title(root_title)
    if not title_norm:
        raise ArgumentError("empty root title")
    scored = []
    for entry in split_entries(crop_reference, style):
        score = title_similarity(title_norm, normalize_title(entry.text), threshold)
        if score >= threshold:
            scored.append((score, entry))
    if not scored:
        raise RootNotCited(f"title {root_title!r} not found among {style.value} references")
    scored.sort(key=lambda pair: pair[0], reverse=True)
    if len(scored) > 1 and scored[0][0] == scored[1][0]:
        raise AmbiguousReference(
            f"{len(scored)} references match {root_title!r} equally well")
    score, entry = scored[0]
    return RootReference(style, _parse_entry_key(entry, style), entry.text, entry.span, score)


# --------------------------------------------------------------------------
# in-text markers

_DASH = r"\-‐‑‒–—"
_NUM_ITEM = rf"\d{{1,4}}(?:\s*[{_DASH}]\s*\d{{1,4}})?"
_BRACKET = re.compile(rf"\[\s*{_NUM_ITEM}(?:\s*,\s*{_NUM_ITEM})*\s*\]")
_BARE_RANGE = re.compile(
    rf"(?<![\w.,\[{_DASH}])(\d{{1,3}})[ \t]*[{_DASH}][ \t]*(\d{{1,3}})(?![\w%{_DASH}]|[.,]\d)")
_SUPERSCRIPT = re.compile(
    rf"(?<=[a-zß-öø-ÿ]{{3}})(\d{{1,3}}(?:[,{_DASH}]\d{{1,3}})*)(?=[\s.,;:!?)\]]|$)")

_COAUTHORS = (rf"(?:\s+et\s+al\.?|(?:\s*,\s*{SURNAME})*\s*,?\s*(?:&|and)\s+{SURNAME})?")
_NARRATIVE = re.compile(
    rf"(?<![\w'’\-])(?P<surname>{SURNAME}){_COAUTHORS}\s*\(\s*(?P<year>{YEAR})(?:\s*,[^()]*)?\)")
_PAREN_GROUP = re.compile(r"\(([^()]*\d{4}[^()]*)\)")
_PAREN_PART = re.compile(
    rf"^\s*(?:(?:see|e\.g\.|cf\.|i\.e\.)\s*,?\s*)?(?:also\s+)?(?P<surname>{SURNAME}){_COAUTHORS}"
    rf"\s*,?\s*(?P<years>{YEAR}(?:\s*,\s*{YEAR})*)(?:\s*,\s*(?:p|pp)\.?\s*[\d{_DASH}]+)?\s*$")
# capitalised words that precede a parenthesised year without being an author
_NOT_SURNAMES = frozenset("""a an and as at by during for from in of on since
    see the these this those to until up with we our in table figure fig section""".split())


def _norm_name(name: str) -> str:
    return " ".join(unicodedata.normalize("NFKC", name).casefold().split())


@dataclass(frozen=True)
class Marker:
    """One in-text citation marker and the keys it refers to.

    ``numbers`` holds inclusive ``(low, high)`` ranges for numeric styles;
    ``authors`` holds ``AuthorYear`` pairs (first author only) for APA.
    """

    span: tuple[int, int]
    text: str
    numbers: tuple[tuple[int, int], ...] = ()
    authors: tuple[AuthorYear, ...] = ()

    def cites(self, key: CitationKey) -> bool:
        if isinstance(key, AuthorYear):
            wanted = (_norm_name(key.surname), key.year)
            return any((_norm_name(a.surname), a.year) == wanted for a in self.authors)
        return any(low <= key <= high for low, high in self.numbers)


def _numeric_items(text: str) -> tuple[tuple[int, int], ...]:
    items = []
    for part in text.strip("[]").split(","):
        bounds = re.split(rf"\s*[{_DASH}]\s*", part.strip())
        low, high = int(bounds[0]), int(bounds[-1])
        if low <= high:
            items.append((low, high))
    return tuple(items)


class MarkerScanner:
    """Finds every in-text citation marker of one style.

    ``bare_numbers`` and ``superscripts`` enable unbracketed AMA markers
    (``1-3`` and ``studies1,2``); numbers above ``max_number`` (usually the
    size of the reference list) are not treated as bare markers.
    """

    def __init__(self, style: ReferenceStyle, bare_numbers: bool = True,
                 superscripts: bool = True, max_number: int | None = None):
        self.style = style
        self.bare_numbers = bare_numbers and style is ReferenceStyle.AMA
        self.superscripts = superscripts and style is ReferenceStyle.AMA
        self.max_number = max_number

    def _bare_ok(self, items) -> bool:
        if not items:
            return False
        return self.max_number is None or all(high <= self.max_number for _, high in items)

    def _numeric_candidates(self, text: str) -> Iterable[Marker]:
        for m in _BRACKET.finditer(text):
            yield Marker(m.span(), m.group(), numbers=_numeric_items(m.group()))
        if self.bare_numbers:
            for m in _BARE_RANGE.finditer(text):
                items = _numeric_items(m.group())
                low, high = int(m.group(1)), int(m.group(2))
                # inverted ranges are still scanned when within bounds but never cite
                if self.max_number is None or max(low, high) <= self.max_number:
                    yield Marker(m.span(), m.group(), numbers=items)
        if self.superscripts:
            for m in _SUPERSCRIPT.finditer(text):
                items = _numeric_items(m.group())
                if self._bare_ok(items):
                    yield Marker(m.span(), m.group(), numbers=items)

    def _author_candidates(self, text: str) -> Iterable[Marker]:
        for m in _NARRATIVE.finditer(text):
            surname = " ".join(m.group("surname").split())
            if surname.casefold() in _NOT_SURNAMES:
                continue
            yield Marker(m.span(), m.group(), authors=(AuthorYear(surname, int(m.group("year")[:4])),))
        for m in _PAREN_GROUP.finditer(text):
            authors = []
            for part in m.group(1).split(";"):
                pm = _PAREN_PART.match(part)
                if pm is None or pm.group("surname").casefold() in _NOT_SURNAMES:
                    continue
                surname = " ".join(pm.group("surname").split())
                for year in re.findall(YEAR, pm.group("years")):
                    authors.append(AuthorYear(surname, int(year[:4])))
            if authors:
                yield Marker(m.span(), m.group(), authors=tuple(authors))

    def scan(self, text: str) -> list[Marker]:
        """All markers in ``text``, non-overlapping, in document order."""
        if self.style.numeric:
            candidates = list(self._numeric_candidates(text))
        else:
            candidates = list(self._author_candidates(text))
        candidates.sort(key=lambda mk: (mk.span[0], -(mk.span[1] - mk.span[0])))
        markers, cursor = [], -1
        for mk in candidates:
            if mk.span[0] >= cursor:
                markers.append(mk)
                cursor = mk.span[1]
        return markers

    def has_marker(self, text: str) -> bool:
        return bool(self.scan(text))


class CitationMatcher:
    """Matches the in-text markers that cite one particular reference key."""

    def __init__(self, scanner: MarkerScanner, key: CitationKey):
        if scanner.style.numeric != (not isinstance(key, AuthorYear)):
            raise ArgumentError(f"key {key!r} does not fit style {scanner.style.value}")
        if isinstance(key, int) and key < 1:
            raise ArgumentError("numeric keys are positive")
        self.scanner = scanner
        self.key = key

    @property
    def style(self) -> ReferenceStyle:
        return self.scanner.style

    def finditer(self, text: str) -> list[CitationOccurrence]:
        return [CitationOccurrence(mk.span, mk.text)
                for mk in self.scanner.scan(text) if mk.cites(self.key)]

    def search(self, text: str) -> bool:
        return any(mk.cites(self.key) for mk in self.scanner.scan(text))


def build_intext_pattern(style: ReferenceStyle, key: CitationKey, **scanner_options) -> CitationMatcher:
    return CitationMatcher(MarkerScanner(style, **scanner_options), key)


def find_occurrences(body_without_refs: str, matcher: CitationMatcher) -> list[CitationOccurrence]:
    return matcher.finditer(body_without_refs)


@dataclass(frozen=True)
class Extraction:
    """Everything located in one citing paper."""

    body: str
    crop_reference: str
    style: ReferenceStyle
    root: RootReference
    matcher: CitationMatcher
    occurrences: list[CitationOccurrence]


def extract_citations(text: str, root_title: str, style: ReferenceStyle | None = None,
                      threshold: float = TITLE_SIMILARITY, bare_numbers: bool = True,
                      superscripts: bool = True) -> Extraction:
    """Run crop, style detection, root lookup and marker search on one paper."""
    body, crop = crop_reference_section(text)
    if style is None:
        style = detect_style(crop)
    root = find_root_reference(crop, root_title, style, threshold)
    max_number = len(split_entries(crop, style)) if style.numeric else None
    if isinstance(root.key, int) and max_number is not None:
        max_number = max(max_number, root.key)
    scanner = MarkerScanner(style, bare_numbers, superscripts, max_number)
    matcher = CitationMatcher(scanner, root.key)
    return Extraction(body, crop, style, root, matcher, find_occurrences(body, matcher))

"""Sentence segmentation, citation windows and per-paper citation records."""

from __future__ import annotations

import json
import os
import re
import tempfile
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import ArgumentError, NoInTextCitation, RecordParseError, SegmentationError
from .extraction import (CitationMatcher, CitationOccurrence, MarkerScanner, ReferenceStyle,
                         RootReference, format_key, parse_key)
from .ingest import SentimentLabel

DEFAULT_ABBREVIATIONS = frozenset({
    "et al", "e.g", "i.e", "Fig", "Figs", "fig", "figs", "vs", "No", "no",
    "Eq", "Eqs", "eq", "cf", "Sec", "Ref", "Refs", "Dr", "Prof", "pp", "Vol", "approx",
})

_TERMINATOR = re.compile(r"[.!?]+[\"')\]’”]*")
_PARAGRAPH = re.compile(r"\n[ \t\r\f\v]*\n\s*")
_PRECEDING_WORD = re.compile(r"(?:(?<=\s)|^)(et\s+al|[^\W\d_][\w.]*)$")


@dataclass(frozen=True)
class SentenceSpan:
    index: int
    char_span: tuple[int, int]
    text: str


_INITIAL_BEFORE = re.compile(r"(?:^|\s)[^\W\d_]\.\s*$")
_INITIAL_AFTER = re.compile(r"\s*[^\W\d_]\.(?:\s|$)")


def _is_abbreviation(before: str, after: str, abbreviations, case_sensitive: bool) -> bool:
    tail = before[-40:]
    m = _PRECEDING_WORD.search(tail)
    if m is None:
        return False
    word = " ".join(m.group(1).split())
    if len(word) == 1 and (word.isupper() or not case_sensitive):
        # an initial only when it sits in a run of initials ("A. P. Felt")
        return bool(_INITIAL_BEFORE.search(tail[:m.start(1)]) or _INITIAL_AFTER.match(after))
    if case_sensitive:
        return word in abbreviations
    return word.casefold() in {a.casefold() for a in abbreviations}


def _boundary_follows(text: str, pos: int, case_sensitive: bool) -> bool:
    """True if whitespace and then a sentence-opening character start at ``pos``."""
    if pos >= len(text) or not text[pos].isspace():
        return pos >= len(text)
    j = pos
    while j < len(text) and text[j].isspace():
        j += 1
    if j == len(text):
        return True
    if not case_sensitive:
        return True
    c = text[j]
    return c.isupper() or c.isdigit() or c == "["


def split_sentences(body: str, abbreviations=DEFAULT_ABBREVIATIONS, case_sensitive: bool = True,
                    paragraph_breaks: bool = True) -> list[SentenceSpan]:
    """Split text into sentence spans.

    A sentence ends at ``.``, ``!`` or ``?`` (plus closing quotes or
    brackets) followed by whitespace and an uppercase letter, digit or ``[``.
    Known abbreviations and runs of single-letter initials never end a sentence. With
    ``case_sensitive=False`` the character after the whitespace is not
    inspected, which makes segmentation independent of letter case. Blank
    lines also end a sentence unless ``paragraph_breaks`` is off.
    """
    cuts = set()
    for m in _TERMINATOR.finditer(body):
        if not _boundary_follows(body, m.end(), case_sensitive):
            continue
        if m.group().startswith(".") and _is_abbreviation(body[:m.start()], body[m.end():m.end() + 4], abbreviations, case_sensitive):
            continue
        cuts.add(m.end())
    if paragraph_breaks:
        cuts.update(m.start() for m in _PARAGRAPH.finditer(body))
    cuts.add(len(body))

    spans, start = [], 0
    for cut in sorted(cuts):
        while start < cut and body[start].isspace():
            start += 1
        end = cut
        while end > start and body[end - 1].isspace():
            end -= 1
        if end > start:
            spans.append(SentenceSpan(len(spans), (start, end), body[start:end]))
        start = max(start, cut)
    return spans


def locate_sentence(sentences: Sequence[SentenceSpan], offset: int) -> int:
    """Position in ``sentences`` of the span containing ``offset``."""
    lo, hi = 0, len(sentences)
    while lo < hi:
        mid = (lo + hi) // 2
        if sentences[mid].char_span[1] <= offset:
            lo = mid + 1
        else:
            hi = mid
    if lo < len(sentences) and sentences[lo].char_span[0] <= offset < sentences[lo].char_span[1]:
        return lo
    raise SegmentationError(f"offset {offset} lies outside every sentence")


def build_window(sentences: Sequence[SentenceSpan], occurrence: CitationOccurrence,
                 max_sentences: int = 5, before: int = 2, after: int = 2) -> list[SentenceSpan]:
    """The citing sentence with up to ``before``/``after`` neighbours."""
    if before < 0 or after < 0 or before + after + 1 > max_sentences:
        raise ArgumentError(f"window {before}+1+{after} exceeds max_sentences={max_sentences}")
    pos = locate_sentence(sentences, occurrence.char_span[0])
    return list(sentences[max(0, pos - before): pos + after + 1])


def filter_foreign(window: Sequence[SentenceSpan], root_matcher: CitationMatcher,
                   any_citation_detector: MarkerScanner) -> list[SentenceSpan]:
    """Drop sentences that cite other papers but not the root paper.

    Sentences carrying a root marker (the citing sentence included) are kept
    even when they co-cite other work.
    """
    kept = []
    for sentence in window:
        if root_matcher.search(sentence.text) or not any_citation_detector.has_marker(sentence.text):
            kept.append(sentence)
    return kept


def strip_foreign_markers(text: str, root_matcher: CitationMatcher,
                          any_citation_detector: MarkerScanner) -> str:
    """Remove markers that do not cite the root paper from ``text``."""
    pieces, cursor = [], 0
    for mk in any_citation_detector.scan(text):
        if mk.cites(root_matcher.key):
            continue
        pieces.append(text[cursor:mk.span[0]])
        cursor = mk.span[1]
    pieces.append(text[cursor:])
    return re.sub(r"[ \t]{2,}", " ", "".join(pieces)).strip()


# --------------------------------------------------------------------------
# records

@dataclass(frozen=True)
class CitationRecord:
    citing_id: str
    label: SentimentLabel | None
    reference_key: str
    corpus: str
    style: ReferenceStyle

    @property
    def class_tag(self) -> str:
        return self.label.value if self.label else "UNLABELED"

    @property
    def subfolder(self) -> str:
        return f"Type{self.label.value}" if self.label else "unlabeled"

    def to_dict(self) -> dict:
        return {"citing_id": self.citing_id, "label": self.label.value if self.label else None,
                "reference": self.reference_key, "style": self.style.value, "corpus": self.corpus}

    @classmethod
    def from_dict(cls, data: dict) -> "CitationRecord":
        label = SentimentLabel(data["label"]) if data.get("label") else None
        return cls(data["citing_id"], label, data["reference"], data["corpus"],
                   ReferenceStyle(data["style"]))


_CONTROL = re.compile(r"[\x00-\x08\x0b-\x1f\x7f]")


def clean_sentence(text: str) -> str:
    """Collapse whitespace (including form feeds) and drop control characters."""
    return " ".join(_CONTROL.sub(" ", text).split())


@dataclass(frozen=True)
class ContextWindow:
    citing_index: int
    sentences: tuple[SentenceSpan, ...]


def context_windows(occurrences: Sequence[CitationOccurrence], sentences: Sequence[SentenceSpan],
                    root_matcher: CitationMatcher, any_citation_detector: MarkerScanner,
                    max_sentences: int = 5, before: int = 2, after: int = 2) -> list[ContextWindow]:
    windows = []
    for occ in occurrences:
        window = build_window(sentences, occ, max_sentences, before, after)
        citing = sentences[locate_sentence(sentences, occ.char_span[0])].index
        windows.append(ContextWindow(citing, tuple(filter_foreign(window, root_matcher, any_citation_detector))))
    return windows


def build_record(citing_id: str, occurrences: Sequence[CitationOccurrence],
                 sentences: Sequence[SentenceSpan], root_ref: RootReference,
                 label: SentimentLabel | None = None, matcher: CitationMatcher | None = None,
                 max_sentences: int = 5, before: int = 2, after: int = 2,
                 strip_foreign: bool = False) -> CitationRecord:
    """Merge the filtered windows of every occurrence into one record.

    Sentences shared by overlapping windows appear once, in document order.
    With ``strip_foreign`` foreign markers are also removed from the kept
    sentences themselves.
    """
    if not occurrences:
        raise NoInTextCitation(f"{citing_id}: no in-text citation of reference {format_key(root_ref.key)}")
    if matcher is None:
        matcher = CitationMatcher(MarkerScanner(root_ref.style), root_ref.key)
    scanner = matcher.scanner
    windows = context_windows(occurrences, sentences, matcher, scanner, max_sentences, before, after)
    chosen = {s.index: s for w in windows for s in w.sentences}
    parts = []
    for index in sorted(chosen):
        text = chosen[index].text
        if strip_foreign:
            text = strip_foreign_markers(text, matcher, scanner)
        text = clean_sentence(text)
        if text:
            parts.append(text)
    return CitationRecord(citing_id, label, format_key(root_ref.key), " ".join(parts), root_ref.style)


_XML_ESCAPES = {"&": "&amp;", "<": "&lt;", ">": "&gt;", "\r": "&#13;", '"': "&quot;"}
_INVALID_XML = re.compile("[\x00-\x08\x0b\x0c\x0e-\x1f￾￿\ud800-\udfff]")


def _escape(text: str, attribute: bool = False) -> str:
    if _INVALID_XML.search(text):
        raise ArgumentError("text contains characters not representable in XML")
    out = "".join(_XML_ESCAPES.get(c, c) for c in text)
    if attribute:
        out = out.replace("\n", "&#10;").replace("\t", "&#9;")
    return out


def record_to_xml(record: CitationRecord) -> str:
    return (f'<record citing_id="{_escape(record.citing_id, True)}" style="{record.style.value}">'
            f"<class>{record.class_tag}</class>"
            f"<reference>{_escape(record.reference_key)}</reference>"
            f"<corpus>{_escape(record.corpus)}</corpus></record>\n")


def record_from_xml(text: str, default_id: str = "") -> CitationRecord:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise RecordParseError(f"not well-formed: {exc}") from exc
    if root.tag != "record":
        raise RecordParseError(f"root element is <{root.tag}>, expected <record>")
    fields = {}
    for name in ("class", "reference", "corpus"):
        node = root.find(name)
        if node is None:
            raise RecordParseError(f"missing <{name}> element")
        fields[name] = node.text or ""
    try:
        label = None if fields["class"] == "UNLABELED" else SentimentLabel(fields["class"])
        style = ReferenceStyle(root.get("style", "IEEE"))
        parse_key(fields["reference"], style)
    except (ValueError, ArgumentError) as exc:
        raise RecordParseError(str(exc)) from exc
    return CitationRecord(root.get("citing_id", default_id), label, fields["reference"],
                          fields["corpus"], style)


def _atomic_write(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_record(record: CitationRecord, path: str | os.PathLike) -> None:
    _atomic_write(Path(path), record_to_xml(record))


def write_record_json(record: CitationRecord, path: str | os.PathLike) -> None:
    _atomic_write(Path(path), json.dumps(record.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")


def read_record(path: str | os.PathLike) -> CitationRecord:
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return record_from_xml(fh.read(), default_id=path.stem)

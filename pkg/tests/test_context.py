import json
import random
import string

import pytest
from hypothesis import given, strategies as st

from citesent.context import (CitationRecord, SentenceSpan, build_record, build_window, clean_sentence,
                              filter_foreign, locate_sentence, read_record, record_from_xml,
                              record_to_xml, split_sentences, strip_foreign_markers, write_record,
                              write_record_json)
from citesent.errors import ArgumentError, NoInTextCitation, RecordParseError, SegmentationError
from citesent.extraction import (CitationOccurrence, ReferenceStyle,
                                 build_intext_pattern, extract_citations)
from citesent.ingest import SentimentLabel

IEEE = ReferenceStyle.IEEE


def texts(spans):
    return [s.text for s in spans]


@pytest.mark.parametrize("body, expected", [
    ("A is good. B is bad.", ["A is good.", "B is bad."]),
    ("Felt et al. showed X. We extend it.", ["Felt et al. showed X.", "We extend it."]),
    ("Results in Fig. 2 agree.", ["Results in Fig. 2 agree."]),
    ("Is it? Yes! Done.", ["Is it?", "Yes!", "Done."]),
    ("He said \"stop.\" Then left.", ["He said \"stop.\"", "Then left."]),
    ("See A. P. Felt for details. Next one.", ["See A. P. Felt for details.", "Next one."]),
    ("Plan B. Then C. D. Felt agreed.", ["Plan B.", "Then C. D. Felt agreed."]),
    ("Values e.g. three. version 2.5 holds.", ["Values e.g. three. version 2.5 holds."]),
    ("First [3]. [4] shows more.", ["First [3].", "[4] shows more."]),
    ("no terminator at all", ["no terminator at all"]),
    ("Heading\n\nParagraph text here.", ["Heading", "Paragraph text here."]),
    ("", []),
])
def test_split_sentences(body, expected):
    assert texts(split_sentences(body)) == expected


def test_paragraph_breaks_can_be_disabled():
    assert texts(split_sentences("Heading\n\nText.", paragraph_breaks=False)) == ["Heading\n\nText."]


def test_case_insensitive_mode_ignores_following_case():
    body = "first part. second part."
    assert len(split_sentences(body)) == 1
    assert len(split_sentences(body, case_sensitive=False)) == 2
    upper = split_sentences(body.upper(), case_sensitive=False)
    assert texts(upper) == [t.upper() for t in texts(split_sentences(body, case_sensitive=False))]


_ALPHABET = string.ascii_letters[:6] + "  ..!?\n[]1"


@given(st.text(alphabet=_ALPHABET, max_size=80))
def test_split_covers_input(body):
    spans = split_sentences(body)
    cursor = 0
    for i, s in enumerate(spans):
        assert s.index == i
        assert body[cursor:s.char_span[0]].strip() == ""
        assert body[s.char_span[0]:s.char_span[1]] == s.text
        assert s.text == s.text.strip() and s.text
        cursor = s.char_span[1]
    assert body[cursor:].strip() == ""


def _numbered(n):
    body = " ".join(f"Sentence {i} here." for i in range(n))
    return body, split_sentences(body)


def _occurrence_at(body, sentences, i):
    start = sentences[i].char_span[0]
    return CitationOccurrence((start, start + 1), body[start])


@pytest.mark.parametrize("n, i, expected", [
    (30, 10, list(range(8, 13))),
    (30, 0, [0, 1, 2]),
    (30, 29, [27, 28, 29]),
    (1, 0, [0]),
])
def test_build_window(n, i, expected):
    body, sentences = _numbered(n)
    assert len(sentences) == n
    window = build_window(sentences, _occurrence_at(body, sentences, i))
    assert [s.index for s in window] == expected


def test_build_window_asymmetric():
    body, sentences = _numbered(10)
    window = build_window(sentences, _occurrence_at(body, sentences, 5), before=0, after=3)
    assert [s.index for s in window] == [5, 6, 7, 8]


def test_build_window_too_wide():
    body, sentences = _numbered(10)
    with pytest.raises(ArgumentError):
        build_window(sentences, _occurrence_at(body, sentences, 5), before=3, after=2)


def test_locate_outside():
    sentences = split_sentences("One. Two.")
    with pytest.raises(SegmentationError):
        locate_sentence(sentences, 100)
    assert locate_sentence(sentences, 5) == 1


def _window(*sentences):
    return [SentenceSpan(i, (0, len(t)), t) for i, t in enumerate(sentences)]


def _ieee(key):
    matcher = build_intext_pattern(IEEE, key)
    return matcher, matcher.scanner


def test_filter_foreign_example():
    window = _window("Other work [3] exists.", "Root work [7] is good.", "Plain sentence.")
    matcher, scanner = _ieee(7)
    assert texts(filter_foreign(window, matcher, scanner)) == ["Root work [7] is good.", "Plain sentence."]


def test_filter_foreign_identity_and_cocitation():
    matcher, scanner = _ieee(7)
    plain = _window("One.", "Two [7].", "Three.")
    assert filter_foreign(plain, matcher, scanner) == plain
    co = _window("as in [3,7]")
    assert filter_foreign(co, matcher, scanner) == co


def test_filter_foreign_idempotent():
    rng = random.Random(5)
    matcher, scanner = _ieee(7)
    pool = ["Plain.", "Cites [7].", "Cites [3].", "Both [3, 7].", "Range [5-9].", "Range [1-3]."]
    for _ in range(100):
        window = _window(*rng.choices(pool, k=5))
        once = filter_foreign(window, matcher, scanner)
        assert filter_foreign(once, matcher, scanner) == once


def test_strip_foreign_markers():
    matcher, scanner = _ieee(7)
    assert strip_foreign_markers("as in [3] and [7] here", matcher, scanner) == "as in and [7] here"
    assert strip_foreign_markers("both [3,7]", matcher, scanner) == "both [3,7]"


def test_clean_sentence():
    assert clean_sentence("a\x0cb \n c\x00d") == "a b c d"


# --------------------------------------------------------------------------
# records

PAPER = """Citing paper

Intro sentence one. Background [3] is known. We follow [7] closely. The idea is sound.
Another [7] use here. Closing words.

References
[3] X. Y, "Other," 2000.
[7] A. P. Felt, "Android permissions demystified," 2011.
"""


def _extract(text=PAPER):
    ex = extract_citations(text, "Android permissions demystified")
    return ex, split_sentences(ex.body)


def test_build_record_merges_and_filters():
    ex, sentences = _extract()
    record = build_record("r/p", ex.occurrences, sentences, ex.root, SentimentLabel.TypeI, ex.matcher)
    assert record.reference_key == "7"
    assert record.label is SentimentLabel.TypeI
    assert "Background [3]" not in record.corpus
    assert record.corpus.count("We follow [7] closely.") == 1
    # the title line is three sentences before the first citation
    assert record.corpus.startswith("Intro sentence one.")
    assert record.corpus.endswith("Another [7] use here. Closing words.")


def test_build_record_single_occurrence_window():
    ex, sentences = _extract(PAPER.replace("Another [7] use", "Another use"))
    record = build_record("r/p", ex.occurrences, sentences, ex.root, matcher=ex.matcher)
    assert record.corpus == "Intro sentence one. We follow [7] closely. The idea is sound. Another use here."
    assert record.label is None and record.class_tag == "UNLABELED"


def test_build_record_strip_foreign():
    text = PAPER.replace("We follow [7] closely.", "We follow [3, 7] and [3] closely.")
    ex, sentences = _extract(text)
    kept = build_record("r/p", ex.occurrences, sentences, ex.root, matcher=ex.matcher)
    stripped = build_record("r/p", ex.occurrences, sentences, ex.root, matcher=ex.matcher,
                            strip_foreign=True)
    assert "and [3] closely" in kept.corpus
    assert "We follow [3, 7] and closely." in stripped.corpus


def test_build_record_no_occurrences():
    ex, sentences = _extract()
    with pytest.raises(NoInTextCitation):
        build_record("r/p", [], sentences, ex.root)


def test_windows_never_exceed_five_sentences():
    body = " ".join(f"Sentence {i} cites [7]." if i % 4 == 0 else f"Sentence {i}." for i in range(40))
    sentences = split_sentences(body)
    matcher, _ = _ieee(7)
    for occ in matcher.finditer(body):
        assert len(build_window(sentences, occ)) <= 5


def _record(label=SentimentLabel.TypeII, corpus="Some <b> & \"q\" text.\r\nnext", key="7", style=IEEE):
    return CitationRecord("root/paper 1", label, key, corpus, style)


def test_xml_shape():
    xml = record_to_xml(_record())
    assert xml.startswith('<record citing_id="root/paper 1" style="IEEE"><class>II</class>')
    assert "<reference>7</reference>" in xml
    assert "&lt;b&gt; &amp; &quot;q&quot;" in xml


@pytest.mark.parametrize("record", [
    _record(), _record(label=None), _record(label=SentimentLabel.TypeI, corpus=""),
    _record(key="Felt, 2011", style=ReferenceStyle.APA),
    _record(corpus="tabs\tand\nnewlines  kept ", style=ReferenceStyle.AMA),
])
def test_xml_round_trip(tmp_path, record):
    assert record_from_xml(record_to_xml(record)) == record
    write_record(record, tmp_path / "r.xml")
    assert read_record(tmp_path / "r.xml") == record


def test_label_two_preserved():
    assert "<class>II</class>" in record_to_xml(_record())
    assert record_from_xml(record_to_xml(_record())).label.value == "II"


def test_xml_rejects_unrepresentable():
    with pytest.raises(ArgumentError):
        record_to_xml(_record(corpus="bad\x01char"))


@pytest.mark.parametrize("xml", [
    "<record><class>I</class><reference>7</reference></record>",
    "<record><class>I</class><reference>7</reference><corpus>x</corpus>",
    "<other><class>I</class><reference>7</reference><corpus>x</corpus></other>",
    "<record><class>III</class><reference>7</reference><corpus>x</corpus></record>",
    "<record style='IEEE'><class>I</class><reference>Felt</reference><corpus>x</corpus></record>",
    "<record style='XYZ'><class>I</class><reference>7</reference><corpus>x</corpus></record>",
])
def test_xml_parse_errors(xml):
    with pytest.raises(RecordParseError):
        record_from_xml(xml)


def test_read_record_defaults_id_to_stem(tmp_path):
    path = tmp_path / "p9.xml"
    path.write_text("<record><class>I</class><reference>3</reference><corpus>x</corpus></record>")
    assert read_record(path).citing_id == "p9"


def test_json_mirror(tmp_path):
    record = _record()
    write_record_json(record, tmp_path / "r.json")
    data = json.loads((tmp_path / "r.json").read_text())
    assert CitationRecord.from_dict(data) == record
    assert data["label"] == "II"


def test_atomic_write_leaves_no_temp(tmp_path):
    write_record(_record(), tmp_path / "sub" / "r.xml")
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["r.xml"]

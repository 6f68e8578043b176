"""Synthetic citing papers with known ground truth.

Papers follow the IEEE, APA and AMA reference/in-text grammars and record
which reference key the root paper has and which sentences cite it, so the
extraction pipeline can be checked end to end.
"""

from __future__ import annotations

import csv
import random
import textwrap
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .extraction import AuthorYear, CitationKey, ReferenceStyle
from .ingest import SentimentLabel, write_title_index


@dataclass(frozen=True)
class RootPaper:
    root_id: str
    title: str
    authors: tuple[str, ...]
    year: int


# The worked-example papers; two Grace (2012) entries are never co-cited.
ROOT_PAPERS = (
    RootPaper("felt2011", "Android permissions demystified",
              ("Felt", "Chin", "Hanna", "Song", "Wagner"), 2011),
    RootPaper("grace2012a", "Unsafe exposure analysis of mobile in-app advertisements",
              ("Grace", "Zhou", "Jiang", "Sadeghi"), 2012),
    RootPaper("grace2012b", "Riskranker: scalable and accurate zero-day android malware detection",
              ("Grace", "Zhou", "Zhang", "Zou", "Jiang"), 2012),
    RootPaper("kelley2013", "Privacy as part of the app decision-making process",
              ("Kelley", "Cranor", "Sadeh"), 2013),
    RootPaper("xu2012", "Aurasium: Practical Policy Enforcement for Android Applications",
              ("Xu", "Saidi", "Anderson"), 2012),
)

SURNAMES = """Agarwal Bird Cohen Evert Loria Manning Nanba Pedregosa Shinyama Spiegel
Tanguy Teufel Venthur Choubey Klein Loper Hersh Peterson Proisl Greiner Kabashi Kando
Okumura Raghavan Lalleman Muller Siddharthan Tidhar Varoquaux Gramfort Michel Thirion
Grisel Duchesnay Moreau Lindqvist Okafor Tanaka Novak Haddad Ferreira Kowalski
Brennan Castillo Dubois Eriksen Fischer Gallo Horvat Ivanova Janssen Keller""".split()

NOUNS = """model dataset protocol graph network framework module query sample corpus
kernel schema pipeline parser benchmark scheduler compiler cache interface runtime
detector ontology sensor signal workload topology cluster server device platform""".split()
ADJECTIVES = """mobile static dynamic formal distributed probabilistic symbolic hybrid
modular sequential parallel sparse dense temporal spatial""".split()
VERBS = """describes reports discusses presents considers studies measures introduces
examines analyzes defines models formalizes characterizes investigates""".split()
VENUES = """Computer Networks|Information Systems|Software Engineering|Data Mining|
Mobile Computing|Security and Privacy|Machine Learning|Distributed Systems""".replace("\n", "").split("|")

POSITIVE = """effective robust accurate efficient elegant reliable valuable useful
promising convincing rigorous insightful practical scalable comprehensive""".split()
NEGATIVE = """flawed inaccurate inefficient unreliable limited inconsistent
questionable unrealistic problematic weak unconvincing restrictive fragile""".split()


@dataclass
class SyntheticPaper:
    citing_id: str
    style: ReferenceStyle
    root: RootPaper
    key: CitationKey
    label: SentimentLabel
    text: str
    citing_sentences: list[str] = field(default_factory=list)
    filename: str = ""


def _initials(rng: random.Random) -> str:
    letters = "ABCDEFGHJKLMNPRSTW"
    return " ".join(f"{rng.choice(letters)}." for _ in range(rng.randint(1, 2)))


def _title(rng: random.Random) -> str:
    return (f"{rng.choice(['A', 'On', 'Towards'])} {rng.choice(ADJECTIVES)} {rng.choice(NOUNS)} "
            f"{rng.choice(['for', 'in', 'over'])} {rng.choice(ADJECTIVES)} {rng.choice(NOUNS)} "
            f"{rng.choice(NOUNS)} {rng.choice(['methods', 'systems', 'studies'])}").capitalize()


def _reference(style: ReferenceStyle, number: int, authors: Sequence[str], year: int,
               title: str, rng: random.Random) -> str:
    venue = rng.choice(VENUES)
    pages = rng.randint(1, 900)
    pages = f"{pages}-{pages + rng.randint(4, 20)}"
    if style is ReferenceStyle.IEEE:
        names = ", ".join(f"{_initials(rng)} {a}" for a in authors)
        return f"[{number}] {names}, \"{title},\" in Proc. Conf. {venue}, {year}, pp. {pages}."
    if style is ReferenceStyle.AMA:
        names = ", ".join(f"{a} {_initials(rng).replace('. ', '').rstrip('.')}" for a in authors)
        return f"{number}. {names}. {title}. J {venue}. {year};{rng.randint(1, 40)}({rng.randint(1, 12)}):{pages}."
    parts = [f"{a}, {_initials(rng)}" for a in authors]
    names = parts[0] if len(parts) == 1 else ", ".join(parts[:-1]) + ", & " + parts[-1]
    return f"{names} ({year}). {title}. Journal of {venue}, {rng.randint(1, 40)}({rng.randint(1, 12)}), {pages}."


def _words(rng: random.Random, polarity: str | None, k: int = 1) -> str:
    pool = {"I": POSITIVE, "II": NEGATIVE}.get(polarity or "", [])
    return " ".join(rng.sample(pool, k)) if pool else ""


def _sentence(rng: random.Random, marker: str | None = None, polarity: str | None = None,
              lead_marker: bool = False) -> str:
    adj = _words(rng, polarity, rng.randint(1, 2)) if polarity else rng.choice(ADJECTIVES)
    noun, other = rng.choice(NOUNS), rng.choice(NOUNS)
    verb = rng.choice(VERBS)
    if marker is None:
        return f"The {rng.choice(ADJECTIVES)} {noun} {verb} the {adj} {other}."
    if lead_marker:
        return f"{marker} {verb} the {adj} {noun} for the {other}."
    template = rng.choice([
        "The {adj} {noun} in {m} {verb} the {other}.",
        "Our {noun} {verb} the {adj} {other} of {m}.",
        "Previous work on the {noun} {m} is {adj}.",
    ])
    return template.format(adj=adj, noun=noun, other=other, verb=verb, m=marker)


def _numeric_marker(style: ReferenceStyle, key: int, n_refs: int, rng: random.Random,
                    variant: str) -> str:
    others = [i for i in range(1, n_refs + 1) if i != key]
    if variant == "single":
        return f"[{key}]"
    if variant == "list":
        items = sorted(rng.sample(others, rng.randint(1, 2)) + [key])
        sep = rng.choice([",", ", "])
        return "[" + sep.join(map(str, items)) + "]"
    low = max(1, key - rng.randint(1, 2))
    high = min(n_refs, key + rng.randint(0, 2))
    if low == high:
        high = min(n_refs, high + 1)
        low = min(low, high - 1)
    dash = rng.choice(["-", "–"])
    if variant == "bare":
        return f"{low}{dash}{high}"
    return f"[{low}{dash}{high}]"


def _foreign_numeric(style: ReferenceStyle, key: int, n_refs: int, rng: random.Random,
                     adversarial: list[int]) -> str:
    if adversarial and rng.random() < 0.6:
        return f"[{rng.choice(adversarial)}]"
    others = [i for i in range(1, n_refs + 1) if i != key]
    pick = sorted(rng.sample(others, rng.randint(1, 2)))
    if len(pick) == 2 and (pick[0] <= key <= pick[1]):
        pick = pick[:1]
    if style is ReferenceStyle.AMA and len(pick) == 2 and rng.random() < 0.4:
        return f"{pick[0]}-{pick[1]}"
    return "[" + ",".join(map(str, pick)) + "]"


def _apa_marker(root: RootPaper, rng: random.Random, variant: str, foreign: AuthorYear | None) -> str:
    surname = root.authors[0]
    many = len(root.authors) > 2
    if variant == "narrative":
        if many:
            return f"{surname} et al. ({root.year})"
        return f"{surname} and {root.authors[1]} ({root.year})"
    if variant == "paren":
        return f"({surname}, {root.year})"
    if variant == "etal":
        return f"({surname} et al., {root.year})"
    other = f"{foreign.surname}, {foreign.year}" if foreign else "Nanba, 2000"
    return f"({other}; {surname} et al., {root.year})"


def make_citing_paper(style: ReferenceStyle, root: RootPaper, label: SentimentLabel,
                      rng: random.Random, citing_id: str = "paper", n_occurrences: int | None = None,
                      wrap: bool | None = None, separable: bool = False) -> SyntheticPaper:
    """Generate one citing paper that cites ``root`` in ``style``.

    With ``separable`` every sentiment-bearing word in the body follows the
    label's polarity; otherwise only citing sentences carry sentiment.
    """
    polarity = label.value
    n_refs = rng.randint(12, 22)
    pool = [s for s in SURNAMES if s not in root.authors]
    refs = []
    for _ in range(n_refs - 1):
        authors = tuple(rng.sample(pool, rng.randint(1, 3)))
        refs.append((authors, rng.randint(1995, 2015), _title(rng)))
    # same first author, different year: must never resolve to the root
    if style is ReferenceStyle.APA and rng.random() < 0.5:
        refs[0] = ((root.authors[0],) + refs[0][0][1:], root.year - rng.randint(1, 4), _title(rng))
    root_entry = (root.authors, root.year, root.title)

    if style is ReferenceStyle.APA:
        entries = sorted(refs + [root_entry], key=lambda e: (e[0][0], e[1], e[2]))
        key: CitationKey = AuthorYear(root.authors[0], root.year)
    else:
        position = rng.choice([1, 2, 7, min(9, n_refs)]) if rng.random() < 0.7 else rng.randint(1, n_refs)
        entries = refs[:position - 1] + [root_entry] + refs[position - 1:]
        key = position
    reference_lines = []
    for number, (authors, year, title) in enumerate(entries, start=1):
        reference_lines.append(_reference(style, number, authors, year, title, rng))

    if wrap is None:
        wrap = rng.random() < 0.5
    if n_occurrences is None:
        n_occurrences = rng.randint(1, 3)
    adversarial = []
    if isinstance(key, int):
        adversarial = [k for k in (key + 10, key * 10 + 1, 10 + key % 10) if k <= n_refs and k != key]

    neutral_polarity = polarity if separable else None
    paragraphs: list[list[str]] = []
    citing: list[str] = []
    for occ in range(n_occurrences):
        para = [_sentence(rng, polarity=neutral_polarity) for _ in range(rng.randint(0, 2))]
        # a foreign citation right before the root citation must be filtered out
        if rng.random() < 0.7:
            if isinstance(key, int):
                para.append(_sentence(rng, _foreign_numeric(style, key, n_refs, rng, adversarial),
                                      neutral_polarity))
            else:
                authors, year, _ = rng.choice(refs[1:])
                para.append(_sentence(rng, f"{authors[0]} ({year})", neutral_polarity))
        if isinstance(key, int):
            variants = ["single", "list", "range"] + (["bare"] if style is ReferenceStyle.AMA else [])
            marker = _numeric_marker(style, key, n_refs, rng, rng.choice(variants))
        else:
            f_authors, f_year, _ = refs[0]
            marker = _apa_marker(root, rng, rng.choice(["narrative", "paren", "etal", "multi"]),
                                 AuthorYear(f_authors[0], f_year))
        lead = style is not ReferenceStyle.APA and marker.startswith("[") and rng.random() < 0.2
        sentence = _sentence(rng, marker, polarity, lead_marker=lead)
        para.append(sentence)
        citing.append(sentence)
        for _ in range(rng.randint(0, 3)):
            if isinstance(key, int) and rng.random() < 0.3:
                para.append(_sentence(rng, _foreign_numeric(style, key, n_refs, rng, adversarial),
                                      neutral_polarity))
            else:
                para.append(_sentence(rng, polarity=neutral_polarity))
        paragraphs.append(para)

    filler = [[_sentence(rng, polarity=neutral_polarity) for _ in range(rng.randint(2, 4))]
              for _ in range(2)]
    body_paras = [filler[0]] + paragraphs + [filler[1]]

    def fill(sentences):
        text = " ".join(sentences)
        if wrap:
            return textwrap.fill(text, width=76, break_long_words=False, break_on_hyphens=False)
        return text

    refs_text = "\n".join(
        textwrap.fill(line, width=76, break_long_words=False, break_on_hyphens=False) if wrap else line
        for line in reference_lines)
    text = (f"{_title(rng)}\n\nAbstract\n\n{fill(filler[0][:2])}\n\n1 Introduction\n\n"
            + "\n\n".join(fill(p) for p in body_paras[1:])
            + f"\n\nReferences\n{refs_text}\n")
    return SyntheticPaper(citing_id, style, root, key, label, text, citing)


def make_corpus(n_per_style: int = 10, seed: int = 0, styles=tuple(ReferenceStyle),
                type2_share: float = 0.3, separable: bool = False,
                labels: Sequence[SentimentLabel] | None = None) -> list[SyntheticPaper]:
    """``n_per_style`` citing papers per style spread over the root papers."""
    rng = random.Random(seed)
    papers = []
    i = 0
    for style in styles:
        for j in range(n_per_style):
            root = ROOT_PAPERS[i % len(ROOT_PAPERS)]
            if labels is not None:
                label = labels[i % len(labels)]
            else:
                label = SentimentLabel.TypeII if rng.random() < type2_share else SentimentLabel.TypeI
            name = f"{style.value.lower()}{j:03d}"
            paper = make_citing_paper(style, root, label, rng, citing_id=f"{root.root_id}/{name}",
                                      separable=separable)
            paper.filename = f"{name}.txt"
            papers.append(paper)
            i += 1
    return papers


def root_text(root: RootPaper) -> str:
    return (f"{root.title}\n\n{', '.join(root.authors)}\n\nAbstract\n\n"
            f"The {root.title.lower()} paper {VERBS[0]} a {NOUNS[0]}.\n")


def write_corpus(directory: str | Path, papers: Sequence[SyntheticPaper],
                 with_labels: bool = True) -> Path:
    """Write papers into ``<directory>/<root_id>/`` folders plus ``titles.csv``.

    Returns the path of the title index.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    by_root: dict[str, list[SyntheticPaper]] = {}
    for paper in papers:
        by_root.setdefault(paper.root.root_id, []).append(paper)
    titles = {}
    for root_id, group in sorted(by_root.items()):
        folder = directory / root_id
        folder.mkdir(exist_ok=True)
        root = group[0].root
        (folder / "root.txt").write_text(root_text(root), encoding="utf-8")
        titles[root_id] = root.title
        for paper in group:
            (folder / paper.filename).write_text(paper.text, encoding="utf-8")
        if with_labels:
            with open(folder / "labels.csv", "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["citing_file", "label"])
                for paper in group:
                    writer.writerow([paper.filename, paper.label.value])
    index = directory / "titles.csv"
    write_title_index(titles, index)
    return index

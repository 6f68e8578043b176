"""
Finding a cited paper and its citation context
==============================================

A citing paper is cropped at its reference heading, the reference style is
detected, the entry for the root paper is located by title, and every
in-text marker pointing at that entry is collected. The sentences around
each marker form the citation context.
"""

from citesent.context import build_record, record_to_xml, split_sentences
from citesent.extraction import extract_citations

TEXT = """Permission systems on mobile devices

Mobile platforms ask users to approve permissions at install time. Earlier
measurements [3] looked at browser extensions. The analysis in [7] is a
thorough and valuable study of over-privileged applications. Many later tools
build on it [2, 7]. Our prototype reuses its permission map.

References
[2] K. Au, "PScout: analyzing the Android permission specification," 2012.
[3] N. Carlini, "An evaluation of the Google Chrome extension security architecture," 2012.
[7] A. P. Felt, E. Chin, S. Hanna, D. Song, and D. Wagner, "Android permissions
demystified," in Proc. CCS, 2011.
[17] R. Xu, "Aurasium: practical policy enforcement," 2012.
"""

# %%
# Extraction resolves the root paper to reference number 7. The marker
# ``[17]`` is not mistaken for it, and the list ``[2, 7]`` counts.
ex = extract_citations(TEXT, "Android permissions demystified")
print("style:", ex.style.value, " key:", ex.root.key, f" similarity: {ex.root.similarity:.2f}")
for occ in ex.occurrences:
    print("  marker", occ.marker_text, "at", occ.char_span)

# %%
# The context keeps up to two sentences on each side of every citing sentence.
# A neighbour citing only another paper (here ``[3]``) is removed.
sentences = split_sentences(ex.body)
record = build_record("felt2011/demo", ex.occurrences, sentences, ex.root, matcher=ex.matcher)
print()
print(record.corpus)

# %%
# Records are stored one per file, in a small XML element format.
print()
print(record_to_xml(record))

"""
Lexicon features for a citation context
=======================================

Each context becomes a set of matched dictionary entries. Single words come
from the positive and negative word lists; incrementer phrases of one to
three tokens are matched inside a sentence.
"""

from citesent.lexicon import extract_features, format_features, load_lexicons

# %%
# The bundled dictionaries are small defaults. Any of the four can be
# replaced by passing a path.
lexicons = load_lexicons()
for lex in lexicons:
    print(f"{lex.tag:<7}{len(lex):>4} entries, e.g. {sorted(lex.entries)[:3]}")

# %%
# A positive and a negative context.
contexts = {
    "positive": "The analysis in [7] is a thorough and valuable study. It was shown to be accurate.",
    "negative": "The approach of [7] is limited. However, its evaluation is flawed and fails on real apps.",
}
for name, text in contexts.items():
    print()
    print(name, format_features(extract_features(text, lexicons)))

# %%
# Features are a presence set, so letter case and repetition do not matter.
text = contexts["negative"]
assert extract_features(text.upper(), lexicons) == extract_features(text + " " + text, lexicons)

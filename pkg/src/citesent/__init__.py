"""Citation context extraction and citation sentiment classification."""

from .bayes import LabeledExample, NBModel, Prediction, load_model, predict, save_model, train
from .context import (CitationRecord, SentenceSpan, build_record, build_window, filter_foreign,
                      read_record, split_sentences, write_record)
from .errors import *  # noqa: F401,F403
from .evaluation import (EvalReport, Protocol, SplitPlan, f1, make_balanced_windows,
                         make_sliding_windows, precision, recall, run_protocol, weighted_average)
from .extraction import (AuthorYear, CitationOccurrence, ReferenceStyle, RootReference,
                         build_intext_pattern, crop_reference_section, detect_style,
                         extract_citations, find_occurrences, find_root_reference)
from .ingest import CorpusEntry, SentimentLabel, convert_pdf, load_title_index, scan_corpus
from .lexicon import Feature, Lexicon, LexiconSet, extract_features, load_lexicon, load_lexicons, tokenize_words

__version__ = "0.1.0"

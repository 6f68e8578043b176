"""Exception hierarchy shared across the pipeline."""


class CitesentError(Exception):
    """Base class for all pipeline errors."""


class ArgumentError(CitesentError, ValueError):
    """An argument is outside the domain of the function."""


class ConversionFailed(CitesentError):
    """External PDF-to-text conversion failed or produced no text."""


class ExtractionError(CitesentError):
    """Base class for per-paper extraction failures."""


class NoReferenceSection(ExtractionError):
    pass


class StyleUndetected(ExtractionError):
    pass


class RootNotCited(ExtractionError):
    pass


class AmbiguousReference(ExtractionError):
    pass


class NoInTextCitation(ExtractionError):
    pass


class SegmentationError(CitesentError):
    """A citation marker fell outside every sentence span (internal bug)."""


class RecordParseError(CitesentError):
    pass


class LexiconFormatError(CitesentError):
    pass


class DegenerateTraining(CitesentError, ValueError):
    """Training data does not contain both classes."""


class ModelParseError(CitesentError):
    pass

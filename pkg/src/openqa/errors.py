"""Exception types raised across the package."""


class OpenQAError(Exception):
    """Base class for every error this package raises deliberately."""


# corpus

class CorpusEmptyDocument(OpenQAError):
    """Document has no tokens under the shared tokenizer."""


class CorpusDuplicateId(OpenQAError):
    """Two documents in one collection share a doc id."""


class CorpusParseError(OpenQAError):
    """Corpus file line could not be parsed; message carries the 1-based line number."""


# index (sparse and dense)

class IndexEmptyCollection(OpenQAError):
    """Index build requires at least one passage."""


class IndexUnknownPassage(OpenQAError):
    """Passage id not present in the index."""


class IndexVersionMismatch(OpenQAError):
    """On-disk index was written with an unsupported format version."""


class IndexCorrupt(OpenQAError):
    """On-disk index directory is missing files or contains unreadable data."""


class IndexModeMismatch(OpenQAError):
    """Search mode does not match the mode the dense index was built with."""


# embedders

class EmbedEmptyText(OpenQAError):
    """Cannot embed text with zero tokens."""


class EmbedderUnavailable(OpenQAError):
    """Remote embedder endpoint unreachable or returned a failure."""


class EmbedderDimensionMismatch(OpenQAError):
    """Vector dimensions disagree."""


# reader

class ReaderScoreShape(OpenQAError):
    """Start and end score vectors have different lengths."""


class ReaderNoContext(OpenQAError):
    """Reader invoked with an empty passage list."""


class GeneratorUnavailable(OpenQAError):
    """Remote answer generator unreachable or returned a failure."""


# pipeline

class PipelineUnknownComponent(OpenQAError):
    """Requested retriever or reader is not registered."""


class BackendUnavailable(OpenQAError):
    """External search engine unreachable or returned a failure."""


# evaluation

class EvalNoGold(OpenQAError):
    """Retrieval metric requires a non-empty relevant set."""


# question generation

class QgenBadSpan(OpenQAError):
    """Answer candidate span lies outside its passage."""


class QgenBadQuery(OpenQAError):
    """SQL query references a column the table does not have."""


class QgenUnsatisfiable(OpenQAError):
    """Sampler controls admit no valid query for the table."""


class QgenExhausted(OpenQAError):
    """Sampler hit its resample budget without finding enough non-empty queries."""

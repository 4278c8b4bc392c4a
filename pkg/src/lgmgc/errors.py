"""Exception hierarchy shared across the package.

The three intermediate classes map onto the CLI exit codes: ConfigError -> 2,
ProviderError -> 3, DataError -> 4.  Everything else exits 1.
"""


class LgmgcError(Exception):
    exit_code = 1


class ConfigError(LgmgcError):
    exit_code = 2


class ProviderError(LgmgcError):
    exit_code = 3


class DataError(LgmgcError):
    exit_code = 4


class EmptyInput(DataError):
    """Text to segment was empty or whitespace-only."""


class MissingDocument(DataError):
    """A chunk referenced a doc_id that is not in the corpus."""


class DuplicateDocId(DataError):
    """Two corpus records share the same document id."""


class MalformedRecord(DataError):
    """A corpus or dataset record could not be parsed."""


class StaleVectorStore(DataError):
    """The vector store was built from a different index file."""


class ProviderUnavailable(ProviderError):
    """Provider could not be reached after the configured retries."""


class ProviderProtocolError(ProviderError):
    """Provider answered, but the response violated the wire contract."""


class NoCandidates(LgmgcError):
    """Break selection was called with no candidates."""


class InvalidParent(DataError):
    """A parent chunk contains no sentences."""


class IncompleteScores(LgmgcError):
    """The unit-score map is missing at least one retrieval unit."""


class DegenerateVector(LgmgcError):
    """Cosine similarity is undefined for a zero vector."""


class InvalidK(ConfigError):
    """Ranking cutoff k must be at least 1."""


class EmptyRanking(LgmgcError):
    """Context assembly needs at least one ranked parent."""


class EmptyEvaluation(DataError):
    """Metrics are undefined over an empty query set."""

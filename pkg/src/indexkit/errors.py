"""Exception hierarchy shared across the toolkit."""


class IndexkitError(Exception):
    """Base class for every error raised by this package."""


# corpus ingestion
class MalformedMarker(IndexkitError):
    """Unbalanced emphasis markers in a plain-text source."""


class EmptyDocument(IndexkitError):
    """Ingestion produced no tokens."""


class BadDirective(IndexkitError):
    """Malformed ##PAGE / ##SEG directive in a tagged source."""


class BadColumnCount(IndexkitError):
    """Token line in a tagged source has the wrong number of columns."""


class UntaggedDocument(IndexkitError):
    """Operation requires a part-of-speech-tagged document."""


# relations
class BadRule(IndexkitError):
    """Pattern rule violates the rule invariants (caught at load time)."""


class BadDictionaryRow(IndexkitError):
    """Synonym dictionary row with fewer than two entries."""


# references
class ForeignTerm(IndexkitError):
    """Term does not belong to the document it is being located in."""


# ranking
class BadWeights(IndexkitError):
    """Ranking weights do not sum to 1."""


# index assembly / validation
class InconsistentInputs(IndexkitError):
    """Index build inputs reference a term id that is missing."""


class UnknownSubject(IndexkitError):
    """Validation decision addresses a subject absent from the draft."""


class StaleDraft(IndexkitError):
    """Validation decision was recorded against a different document."""


class InvalidDecision(IndexkitError):
    """Decision payload violates the action's requirements."""


class SchemaVersionMismatch(IndexkitError):
    """Interchange document carries an unsupported schema version."""


class MalformedDocument(IndexkitError):
    """Interchange document cannot be parsed."""


# evaluation
class EmptyDraft(IndexkitError):
    """Candidate index has no descriptors to evaluate."""


class NoRelations(IndexkitError):
    """Candidate index has no relations to evaluate."""


class EmptyTraditional(IndexkitError):
    """Baseline comparison needs a non-empty traditional index."""


class NonApplicable(IndexkitError):
    """Metric is undefined for these inputs (e.g. no traditional index)."""


# cli / service
class BadConfig(IndexkitError):
    """Configuration file is malformed or references missing files."""


class CorruptDecisionLog(IndexkitError):
    """Decision log contains an unreadable record."""

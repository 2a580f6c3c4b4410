"""Citation matching cascades, an inaccuracy taxonomy and an evaluation kit."""

from citematch.model import (
    Author,
    CitedReference,
    Corpus,
    Domain,
    GroundTruthLink,
    MatchRecord,
    Outcome,
    SourceArticle,
    TargetArticle,
    validate_corpus,
)

__version__ = "0.1.0"

__all__ = [
    "Author",
    "CitedReference",
    "Corpus",
    "Domain",
    "GroundTruthLink",
    "MatchRecord",
    "Outcome",
    "SourceArticle",
    "TargetArticle",
    "__version__",
    "validate_corpus",
]

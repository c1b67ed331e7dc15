"""Exception types shared across the pipeline."""


class QueryMinerError(Exception):
    """Base class for all errors raised by this package."""


class MalformedRow(QueryMinerError):
    """An export row is missing a required column."""


class BadTimestamp(QueryMinerError):
    """A timestamp column could not be parsed."""


class UnparseableUrl(QueryMinerError):
    """A URL has no query-string component to extract from."""


class MalformedGazetteer(QueryMinerError):
    """A gazetteer file row does not conform to the documented format."""


class DuplicateLocationId(MalformedGazetteer):
    """Two gazetteer rows claim the same location id."""


class KbError(QueryMinerError):
    """Base class for knowledge-base client failures."""


class KbUnavailable(KbError):
    """Transport-level failure talking to a knowledge base; retryable."""


class KbMalformedResponse(KbError):
    """A knowledge base answered with a payload we cannot interpret."""


class MalformedGsc(QueryMinerError):
    """A gold-standard corpus file violates its format."""


class OverlappingAnnotation(MalformedGsc):
    """Two annotations by the same annotator overlap within one query."""


class UnknownCategory(MalformedGsc):
    """An annotation uses a category outside the known set."""


class SurfaceNotInQuery(MalformedGsc):
    """An annotated entity surface does not occur in its query."""


class ConfigError(QueryMinerError):
    """Pipeline configuration is invalid or references missing files."""


class MissingPriorStage(QueryMinerError):
    """A pipeline command needs output of an earlier stage that is absent."""

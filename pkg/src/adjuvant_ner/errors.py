"""Typed errors raised across the pipeline.

Every data-level failure derives from PipelineError so the CLI can map it
to exit code 1; usage errors are left to argparse (exit code 2).
"""

from __future__ import annotations


class PipelineError(Exception):
    """Base class for all typed pipeline errors."""


# corpus loading
class MissingColumn(PipelineError):
    pass


class DuplicateId(PipelineError):
    pass


class EmptyField(PipelineError):
    pass


class EmptyName(PipelineError):
    pass


class UnknownFormat(PipelineError):
    pass


class ConflictingMapping(PipelineError):
    pass


class StoplistOverlap(PipelineError):
    pass


# prompt rendering
class MissingContext(PipelineError):
    pass


class ShotMismatch(PipelineError):
    pass


class TargetInExamples(PipelineError):
    pass


class PoolTooSmall(PipelineError):
    pass


# gateway
class GatewayError(PipelineError):
    pass


class TransportError(GatewayError):
    pass


class AuthError(GatewayError):
    pass


class RateLimited(GatewayError):
    pass


class BackendMismatch(GatewayError):
    pass


# response parsing (carried inside ParseResult, never raised mid-parse)
class ParseError(PipelineError):
    pass


class MissingDoneMarker(ParseError):
    pass


class EmptyResponse(ParseError):
    pass


# scoring
class UndefinedMetric(PipelineError):
    pass


class VerdictForNonMismatch(PipelineError):
    pass


class DuplicateVerdict(PipelineError):
    pass


# adjudication
class DuplicateCase(PipelineError):
    pass


class DuplicateReviewer(PipelineError):
    pass


class CaseClosed(PipelineError):
    pass


class PrematureAdjudication(PipelineError):
    pass


class InvalidVerdict(PipelineError):
    pass


class UnknownCase(PipelineError):
    pass


# experiment / CLI
class ConfigError(PipelineError):
    pass


class MissingVerdicts(PipelineError):
    pass

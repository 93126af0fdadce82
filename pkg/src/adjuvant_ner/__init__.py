"""Vaccine adjuvant name extraction and evaluation pipeline.

Prompted LLM extraction over clinical-trial records and article abstracts,
exact-match scoring against gold annotations, and a two-reviewer-plus-
tie-breaker adjudication workflow for the mismatches.
"""

__version__ = "0.1.0"

"""Shared name normalization: case fold, collapse whitespace runs, trim."""

from __future__ import annotations


def normalize(name: str) -> str:
    # Case-insensitive exact matching; whitespace runs never carry meaning.
    return " ".join(name.split()).casefold()

"""Deterministic prompt rendering for both dataset kinds.

The zero-shot templates are versioned text assets transcribed from the
published prompt figures; rendering replaces the template's placeholder
input line with the target document's line and, for k-shot configurations,
inserts an ``### Examples:`` section immediately before ``### Task Input:``.
Rendering is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Iterable, Sequence

from .corpus import DocumentKind, DocumentRecord
from .errors import MissingContext, PoolTooSmall, ShotMismatch, TargetInExamples

TASK_INPUT_HEADING = "### Task Input:"
EXAMPLES_HEADING = "### Examples:"
DONE_SENTINEL = "Done"
MAX_SHOTS = 4

_TEMPLATE_FILES = {
    DocumentKind.ABSTRACT: "abstract_prompt.txt",
    DocumentKind.TRIAL: "trial_prompt.txt",
}


class ContextMode(str, Enum):
    WITH = "with"
    WITHOUT = "without"


@dataclass(frozen=True, slots=True)
class PromptConfig:
    kind: DocumentKind
    context_mode: ContextMode
    shots: int
    example_pool_id: str = "gold-annotated-corpus"

    def __post_init__(self) -> None:
        if not 0 <= self.shots <= MAX_SHOTS:
            raise ShotMismatch(f"shots must be in 0..{MAX_SHOTS}, got {self.shots}")


@dataclass(frozen=True, slots=True)
class FewShotExample:
    input_line: str
    expected_rows: tuple[tuple[str, str], ...]


@dataclass(frozen=True, slots=True)
class PromptBundle:
    text: str
    config: PromptConfig
    target_id: str


def load_template(kind: DocumentKind) -> str:
    text = (
        resources.files("adjuvant_ner.templates")
        .joinpath(_TEMPLATE_FILES[kind])
        .read_text(encoding="utf-8")
    )
    # The prompt ends with the task-input line; the asset's final newline is
    # an editor convention, not prompt content.
    return text.removesuffix("\n")


def render_task_input(record: DocumentRecord, context_mode: ContextMode) -> str:
    """Render one document as the tab-separated task-input line."""
    if record.kind is DocumentKind.ABSTRACT:
        body_label, context_label = "Abstract", "Substances"
    else:
        body_label, context_label = "Brief Description", "Interventions"
    line = f"{record.id}\tTitle: {record.title}. {body_label}: {record.body}."
    if context_mode is ContextMode.WITH:
        if not record.context:
            raise MissingContext(f"{record.id}: context requested but record has none")
        line += f" {context_label}: {', '.join(record.context)}."
    return line


def render_example(example: FewShotExample) -> list[str]:
    lines = [example.input_line]
    lines.extend(f"{doc_id}\t{name}" for doc_id, name in example.expected_rows)
    lines.append(DONE_SENTINEL)
    return lines


def render_prompt(
    record: DocumentRecord,
    config: PromptConfig,
    examples: Sequence[FewShotExample] = (),
) -> PromptBundle:
    if record.kind is not config.kind:
        raise ShotMismatch(f"record kind {record.kind.value} does not match config {config.kind.value}")
    if len(examples) != config.shots:
        raise ShotMismatch(f"expected {config.shots} example(s), got {len(examples)}")
    for ex in examples:
        if any(doc_id == record.id for doc_id, _ in ex.expected_rows):
            raise TargetInExamples(f"example uses the target document {record.id!r}")

    lines = load_template(config.kind).split("\n")
    lines[-1] = render_task_input(record, config.context_mode)
    if examples:
        at = lines.index(TASK_INPUT_HEADING)
        block = [EXAMPLES_HEADING]
        for ex in examples:
            block.extend(render_example(ex))
        lines[at:at] = block
    return PromptBundle(text="\n".join(lines), config=config, target_id=record.id)


def select_examples(
    pool: Iterable[tuple[DocumentRecord, Sequence[str]]],
    k: int,
    exclude_id: str | None = None,
    context_mode: ContextMode = ContextMode.WITH,
) -> list[FewShotExample]:
    """Pick the first k usable pool entries in stable id order.

    A pool entry is usable when it has at least one gold name, is not the
    excluded target, and can be rendered under the requested context mode.
    """
    usable = [
        (record, names)
        for record, names in sorted(pool, key=lambda entry: entry[0].id)
        if record.id != exclude_id
        and names
        and (context_mode is ContextMode.WITHOUT or record.context)
    ]
    if k > len(usable):
        raise PoolTooSmall(f"need {k} example(s), pool has {len(usable)} usable entries")
    return [
        FewShotExample(
            input_line=render_task_input(record, context_mode),
            expected_rows=tuple((record.id, name) for name in sorted(names)),
        )
        for record, names in usable[:k]
    ]

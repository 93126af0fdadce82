"""Human validation workflow for stable mismatches.

Each case takes two independent verdicts; equal decisions close it as Agreed,
unequal ones mark it Disputed, and a third reviewer's verdict adjudicates.
Verdicts and case creations land in an append-only JSONL event log that is
replayed on open, giving a durable audit trail.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import DocumentRecord
from .errors import (
    CaseClosed,
    DuplicateCase,
    DuplicateReviewer,
    InvalidVerdict,
    PrematureAdjudication,
    UnknownCase,
)
from .postprocess import Extraction
from .scoring import FinalDecision
from .textnorm import normalize

EXCERPT_RADIUS = 200


class Decision(str, Enum):
    VALID = "valid_adjuvant"
    INVALID = "invalid"


class CaseStatus(str, Enum):
    PENDING = "Pending"
    SINGLE_REVIEW = "SingleReview"
    AGREED = "Agreed"
    DISPUTED = "Disputed"
    ADJUDICATED = "Adjudicated"


TERMINAL_STATUSES = (CaseStatus.AGREED, CaseStatus.ADJUDICATED)


@dataclass(frozen=True, slots=True)
class Verdict:
    reviewer_id: str
    decision: Decision
    gold_linkage: str | None = None
    reason: str = ""
    timestamp: str = ""

    def __post_init__(self) -> None:
        if not self.reviewer_id.strip():
            raise InvalidVerdict("reviewer_id must be non-empty")
        if self.decision is Decision.INVALID and not self.reason.strip():
            raise InvalidVerdict("an invalid decision requires a documented reason")


@dataclass(slots=True)
class AdjudicationCase:
    case_id: str
    extraction: Extraction
    source_excerpt: str
    gold_names: tuple[str, ...]
    status: CaseStatus = CaseStatus.PENDING
    verdicts: list[Verdict] = field(default_factory=list)
    final: Decision | None = None


def case_id_for(doc_id: str, name: str) -> str:
    return hashlib.sha256(f"{doc_id}\t{normalize(name)}".encode("utf-8")).hexdigest()[:16]


def _excerpt(record: DocumentRecord, name: str) -> str:
    text = f"{record.title}\n{record.body}"
    at = text.casefold().find(name.casefold())
    if at < 0:
        return record.title
    start = max(0, at - EXCERPT_RADIUS)
    end = min(len(text), at + len(name) + EXCERPT_RADIUS)
    return text[start:end]


def create_cases(
    stable_mismatches: Iterable[tuple[Extraction, DocumentRecord, Sequence[str]]],
) -> list[AdjudicationCase]:
    """One Pending case per distinct (document, normalized name) mismatch."""
    cases: list[AdjudicationCase] = []
    seen: set[tuple[str, str]] = set()
    for extraction, record, gold_names in stable_mismatches:
        key = (extraction.doc_id, normalize(extraction.name))
        if key in seen:
            continue
        seen.add(key)
        cases.append(
            AdjudicationCase(
                case_id=case_id_for(*key),
                extraction=extraction,
                source_excerpt=_excerpt(record, extraction.name),
                gold_names=tuple(gold_names),
            )
        )
    return cases


def apply_verdict(case: AdjudicationCase, verdict: Verdict, adjudication: bool = False) -> None:
    """Advance the case state machine in place; raises typed errors on misuse."""
    if case.status in TERMINAL_STATUSES:
        raise CaseClosed(f"case {case.case_id} is {case.status.value}")
    if any(v.reviewer_id == verdict.reviewer_id for v in case.verdicts):
        raise DuplicateReviewer(f"{verdict.reviewer_id} already reviewed case {case.case_id}")
    if adjudication and case.status is not CaseStatus.DISPUTED:
        raise PrematureAdjudication(
            f"case {case.case_id} is {case.status.value}, not Disputed"
        )

    case.verdicts.append(verdict)
    if case.status is CaseStatus.PENDING:
        case.status = CaseStatus.SINGLE_REVIEW
    elif case.status is CaseStatus.SINGLE_REVIEW:
        first = case.verdicts[0]
        if first.decision is verdict.decision:
            case.status = CaseStatus.AGREED
            case.final = verdict.decision
        else:
            case.status = CaseStatus.DISPUTED
    elif case.status is CaseStatus.DISPUTED:
        case.status = CaseStatus.ADJUDICATED
        case.final = verdict.decision


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class CaseStore:
    """Case set backed by an append-only event log; thread-safe."""

    def __init__(self, path: str | Path | None = None):
        self._cases: dict[str, AdjudicationCase] = {}
        self._lock = threading.RLock()
        self.path = Path(path) if path is not None else None
        if self.path is not None and self.path.exists():
            self._replay()

    def _replay(self) -> None:
        assert self.path is not None
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                event = json.loads(line)
                if event["event"] == "case":
                    case = AdjudicationCase(
                        case_id=event["case_id"],
                        extraction=Extraction(
                            doc_id=event["doc_id"],
                            name=event["name"],
                            source_run=event.get("source_run", 0),
                        ),
                        source_excerpt=event["source_excerpt"],
                        gold_names=tuple(event["gold_names"]),
                    )
                    self._cases[case.case_id] = case
                else:
                    verdict = Verdict(
                        reviewer_id=event["reviewer_id"],
                        decision=Decision(event["decision"]),
                        gold_linkage=event.get("gold_linkage"),
                        reason=event.get("reason", ""),
                        timestamp=event.get("timestamp", ""),
                    )
                    apply_verdict(
                        self._cases[event["case_id"]],
                        verdict,
                        adjudication=bool(event.get("adjudication", False)),
                    )

    def _persist(self, event: dict) -> None:
        if self.path is None:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def add_cases(self, cases: Iterable[AdjudicationCase]) -> None:
        with self._lock:
            for case in cases:
                if case.case_id in self._cases:
                    raise DuplicateCase(f"case {case.case_id} already exists")
                self._cases[case.case_id] = case
                self._persist(
                    {
                        "event": "case",
                        "case_id": case.case_id,
                        "doc_id": case.extraction.doc_id,
                        "name": case.extraction.name,
                        "source_run": case.extraction.source_run,
                        "source_excerpt": case.source_excerpt,
                        "gold_names": list(case.gold_names),
                    }
                )

    def get(self, case_id: str) -> AdjudicationCase:
        with self._lock:
            try:
                return self._cases[case_id]
            except KeyError:
                raise UnknownCase(f"no case {case_id}") from None

    def cases(self, status: CaseStatus | None = None) -> list[AdjudicationCase]:
        with self._lock:
            selected = [
                c for c in self._cases.values() if status is None or c.status is status
            ]
        return sorted(selected, key=lambda c: c.case_id)

    def progress(self) -> dict[str, int]:
        with self._lock:
            counts = {status.value: 0 for status in CaseStatus}
            for case in self._cases.values():
                counts[case.status.value] += 1
            return counts

    def submit(
        self, case_id: str, verdict: Verdict, adjudication: bool = False
    ) -> AdjudicationCase:
        with self._lock:
            case = self.get(case_id)
            if not verdict.timestamp:
                verdict = Verdict(
                    reviewer_id=verdict.reviewer_id,
                    decision=verdict.decision,
                    gold_linkage=verdict.gold_linkage,
                    reason=verdict.reason,
                    timestamp=_now(),
                )
            apply_verdict(case, verdict, adjudication=adjudication)
            self._persist(
                {
                    "event": "verdict",
                    "case_id": case_id,
                    "reviewer_id": verdict.reviewer_id,
                    "decision": verdict.decision.value,
                    "gold_linkage": verdict.gold_linkage,
                    "reason": verdict.reason,
                    "timestamp": verdict.timestamp,
                    "adjudication": adjudication,
                }
            )
            return case

    def export_verdicts(self) -> list[FinalDecision]:
        """Final decisions for cases in a terminal state, sorted by case id."""
        with self._lock:
            finals = [c for c in self._cases.values() if c.final is not None]
        return [
            FinalDecision(
                doc_id=c.extraction.doc_id,
                name=c.extraction.name,
                valid=c.final is Decision.VALID,
                gold_linkage=next(
                    (
                        v.gold_linkage
                        for v in reversed(c.verdicts)
                        if v.decision is c.final and v.gold_linkage
                    ),
                    None,
                ),
            )
            for c in sorted(finals, key=lambda c: c.case_id)
        ]

    def snapshot(self) -> bytes:
        """Canonical byte serialization of the full case set, for audits."""
        with self._lock:
            payload = [
                {
                    "case_id": c.case_id,
                    "doc_id": c.extraction.doc_id,
                    "name": c.extraction.name,
                    "source_excerpt": c.source_excerpt,
                    "gold_names": list(c.gold_names),
                    "status": c.status.value,
                    "final": c.final.value if c.final else None,
                    "verdicts": [
                        {
                            "reviewer_id": v.reviewer_id,
                            "decision": v.decision.value,
                            "gold_linkage": v.gold_linkage,
                            "reason": v.reason,
                            "timestamp": v.timestamp,
                        }
                        for v in c.verdicts
                    ],
                }
                for c in sorted(self._cases.values(), key=lambda c: c.case_id)
            ]
        return json.dumps(payload, ensure_ascii=False, sort_keys=True).encode("utf-8")

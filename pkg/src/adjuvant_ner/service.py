"""HTTP API over the adjudication case store, consumed by the review client."""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel

from .adjudication import AdjudicationCase, CaseStatus, CaseStore, Decision, Verdict
from .errors import (
    CaseClosed,
    DuplicateReviewer,
    InvalidVerdict,
    PrematureAdjudication,
    UnknownCase,
)

_CONFLICTS = (CaseClosed, DuplicateReviewer, PrematureAdjudication)


class VerdictBody(BaseModel):
    reviewer_id: str
    decision: Literal["valid_adjuvant", "invalid"]
    gold_linkage: str | None = None
    reason: str = ""
    adjudication: bool = False


def case_payload(case: AdjudicationCase, blind: bool) -> dict:
    return {
        "case_id": case.case_id,
        "extraction": {
            "doc_id": case.extraction.doc_id,
            "name": case.extraction.name,
            "source_run": case.extraction.source_run,
        },
        "source_excerpt": case.source_excerpt,
        "gold_names": [] if blind else list(case.gold_names),
        "status": case.status.value,
        "verdicts": [
            {
                "reviewer_id": v.reviewer_id,
                "decision": v.decision.value,
                "gold_linkage": None if blind else v.gold_linkage,
                "reason": v.reason,
                "timestamp": v.timestamp,
            }
            for v in case.verdicts
        ],
        "final": case.final.value if case.final else None,
        "blind": blind,
    }


def build_app(store: CaseStore, blind: bool = False) -> FastAPI:
    app = FastAPI(title="adjuvant-ner adjudication")

    @app.get("/cases")
    def list_cases(
        status: str | None = None,
        page: int = Query(default=1, ge=1),
        page_size: int = Query(default=50, ge=1, le=500),
    ) -> dict:
        wanted: CaseStatus | None = None
        if status is not None:
            try:
                wanted = CaseStatus(status)
            except ValueError:
                raise HTTPException(422, detail={"error": "UnknownStatus", "message": status})
        cases = store.cases(wanted)
        start = (page - 1) * page_size
        return {
            "cases": [case_payload(c, blind) for c in cases[start : start + page_size]],
            "page": page,
            "page_size": page_size,
            "total": len(cases),
        }

    @app.get("/cases/{case_id}")
    def get_case(case_id: str) -> dict:
        try:
            case = store.get(case_id)
        except UnknownCase as exc:
            raise HTTPException(404, detail={"error": "UnknownCase", "message": str(exc)})
        return case_payload(case, blind)

    @app.post("/cases/{case_id}/verdicts")
    def post_verdict(case_id: str, body: VerdictBody) -> dict:
        try:
            verdict = Verdict(
                reviewer_id=body.reviewer_id,
                decision=Decision(body.decision),
                gold_linkage=body.gold_linkage,
                reason=body.reason,
            )
            case = store.submit(case_id, verdict, adjudication=body.adjudication)
        except UnknownCase as exc:
            raise HTTPException(404, detail={"error": "UnknownCase", "message": str(exc)})
        except _CONFLICTS as exc:
            raise HTTPException(
                409, detail={"error": type(exc).__name__, "message": str(exc)}
            )
        except InvalidVerdict as exc:
            raise HTTPException(
                422, detail={"error": "InvalidVerdict", "message": str(exc)}
            )
        return case_payload(case, blind)

    @app.get("/progress")
    def progress() -> dict:
        return store.progress()

    return app


def serve(store: CaseStore, bind: str = "127.0.0.1:8000", blind: bool = False) -> None:
    import uvicorn

    host, _, port = bind.rpartition(":")
    uvicorn.run(build_app(store, blind=blind), host=host or "127.0.0.1", port=int(port))

"""HTTP transport for the scoring service.

Endpoints:
  POST /phases/{name}/submissions?team=NAME   CSV body ``id,score``
  GET  /leaderboard
  GET  /receipts/{receipt}
  POST /admin/rescore?k=K                     JSON body {"scores_dir": DIR}

The admin endpoint requires the operator token from the
``DFBENCH_OPERATOR_TOKEN`` environment variable in the ``X-Operator-Token``
header. Responses never include hidden labels or fake-method tags.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse

from ..submission import SubmissionFormatError, parse_submission_csv, read_submission_csv
from .core import (
    BenchService,
    DuplicateIdsError,
    ExtraIdsError,
    MissingIdsError,
    QuotaExceededError,
    ScoreRangeError,
    ServiceError,
    SubmissionsNotAcceptedError,
    UnknownPhaseError,
    WindowClosedError,
)
from .store import SubmissionRecord

OPERATOR_TOKEN_ENV = "DFBENCH_OPERATOR_TOKEN"

_STATUS = {
    UnknownPhaseError: 404,
    SubmissionsNotAcceptedError: 403,
    WindowClosedError: 403,
    QuotaExceededError: 429,
    MissingIdsError: 422,
    ExtraIdsError: 422,
    DuplicateIdsError: 422,
    ScoreRangeError: 422,
}


def _error_response(exc: ServiceError) -> JSONResponse:
    return JSONResponse(
        status_code=_STATUS.get(type(exc), 400),
        content={"error": exc.kind, "detail": str(exc)},
    )


def _receipt_payload(record: SubmissionRecord) -> dict:
    return {
        "receipt": record.receipt,
        "team": record.team,
        "phase": record.phase,
        "received_at": record.received_at,
        "source": record.source,
        "auc": record.auc,
    }


def create_app(service: BenchService) -> FastAPI:
    app = FastAPI(title="dfbench scoring service")

    @app.exception_handler(ServiceError)
    async def service_error_handler(request: Request, exc: ServiceError):
        return _error_response(exc)

    @app.post("/phases/{phase}/submissions")
    async def submit(phase: str, request: Request, team: str = Query(...)):
        body = await request.body()
        try:
            rows = parse_submission_csv(body.decode("utf-8"))
        except (SubmissionFormatError, UnicodeDecodeError) as exc:
            return JSONResponse(status_code=400, content={"error": "malformed-csv", "detail": str(exc)})
        record = service.ingest_submission(team, phase, rows)
        return _receipt_payload(record)

    @app.get("/leaderboard")
    async def leaderboard():
        entries = service.leaderboard()
        return {
            "entries": [
                {"rank": e.rank, "team": e.team, "public_auc": e.public_auc, "private_auc": e.private_auc}
                for e in entries
            ]
        }

    @app.get("/receipts/{receipt}")
    async def receipt(receipt: str):
        record = service.store.get(receipt)
        if record is None:
            return JSONResponse(status_code=404, content={"error": "unknown-receipt", "detail": receipt})
        return _receipt_payload(record)

    @app.post("/admin/rescore")
    async def rescore(
        request: Request,
        k: int = Query(...),
        x_operator_token: str | None = Header(default=None),
    ):
        expected = os.environ.get(OPERATOR_TOKEN_ENV)
        if not expected or x_operator_token != expected:
            return JSONResponse(status_code=403, content={"error": "forbidden", "detail": "operator token required"})
        payload = await request.json()
        scores_dir = Path(payload["scores_dir"])
        if not scores_dir.is_dir():
            return JSONResponse(
                status_code=400, content={"error": "bad-request", "detail": f"{scores_dir} is not a directory"}
            )
        scores_by_team = {p.stem: read_submission_csv(p) for p in sorted(scores_dir.glob("*.csv"))}
        report = service.rescore_private(k, scores_by_team)
        return {
            "entries": [
                {"rank": e.rank, "team": e.team, "public_auc": e.public_auc, "private_auc": e.private_auc}
                for e in report.entries
            ],
            "shifts": [{"team": t, "old_rank": a, "new_rank": b} for t, a, b in report.shifts],
            "flagged": [{"team": t, "old_rank": a, "new_rank": b} for t, a, b in report.flagged],
            "rescored": report.rescored,
        }

    return app

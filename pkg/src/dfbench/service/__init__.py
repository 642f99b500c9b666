"""Challenge scoring service: phases, quotas, leaderboard, re-scoring."""

from .config import ConfigError, PhaseConfig, ServiceConfig, load_config, parse_utc
from .core import (
    BenchService,
    DuplicateIdsError,
    ExtraIdsError,
    LeaderboardEntry,
    MissingIdsError,
    QuotaExceededError,
    RescoreReport,
    ScoreRangeError,
    ServiceError,
    SubmissionsNotAcceptedError,
    TeamScores,
    UnknownPhaseError,
    WindowClosedError,
    rank_entries,
    team_scores_from_records,
)
from .http import OPERATOR_TOKEN_ENV, create_app
from .store import SubmissionRecord, SubmissionStore

__all__ = [
    "BenchService",
    "ConfigError",
    "DuplicateIdsError",
    "ExtraIdsError",
    "LeaderboardEntry",
    "MissingIdsError",
    "OPERATOR_TOKEN_ENV",
    "PhaseConfig",
    "QuotaExceededError",
    "RescoreReport",
    "ScoreRangeError",
    "ServiceConfig",
    "ServiceError",
    "SubmissionRecord",
    "SubmissionStore",
    "SubmissionsNotAcceptedError",
    "TeamScores",
    "UnknownPhaseError",
    "WindowClosedError",
    "create_app",
    "load_config",
    "parse_utc",
    "rank_entries",
    "team_scores_from_records",
]

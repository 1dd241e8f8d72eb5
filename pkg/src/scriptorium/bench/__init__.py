from .answers import QTYPES, ParsedAnswer, extract_answer
from .clients import OracleClient, RemoteClient, ScriptedClient, ToolClient
from .metrics import (
    average_precision_at,
    f1_score,
    metric_accuracy,
    metric_miou,
    metric_mre,
    metric_prf_coverage,
    metric_retrieval,
    metric_ssim,
    recall_at_k,
)
from .questions import TASKS, BenchCorpus, QuestionInstance, generate_questions
from .runner import DEFAULT_RETRIES, MetricReport, QuestionRecord, run_benchmark

__all__ = [
    "QTYPES", "ParsedAnswer", "extract_answer",
    "OracleClient", "RemoteClient", "ScriptedClient", "ToolClient",
    "average_precision_at", "f1_score", "metric_accuracy", "metric_miou",
    "metric_mre", "metric_prf_coverage", "metric_retrieval", "metric_ssim",
    "recall_at_k",
    "TASKS", "BenchCorpus", "QuestionInstance", "generate_questions",
    "DEFAULT_RETRIES", "MetricReport", "QuestionRecord", "run_benchmark",
]

"""Benchmark execution: query -> extract -> retry -> aggregate.

Per question the client is queried up to `retries` times in total; an
answer that still fails extraction is scored incorrect. Aggregation sorts
records by qid first, so reports are independent of completion order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import ArgumentError
from ..images import BoundingBox, RasterImage
from .answers import extract_answer
from .metrics import (
    metric_accuracy,
    metric_miou,
    metric_mre,
    metric_prf_coverage,
    metric_retrieval,
    metric_ssim,
)
from .questions import MODALITY_OPTIONS, BenchCorpus, QuestionInstance

DEFAULT_RETRIES = 3


@dataclass
class QuestionRecord:
    qid: str
    task: str
    qtype: str
    attempts: int
    valid: bool
    value: object = None
    errors: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        value = self.value
        if isinstance(value, RasterImage):
            value = f"<image {value.width}x{value.height}>"
        elif isinstance(value, list):
            value = [list(v) if isinstance(v, tuple) else v for v in value]
        return {"qid": self.qid, "task": self.task, "qtype": self.qtype,
                "attempts": self.attempts, "valid": self.valid, "value": value,
                "errors": self.errors}


@dataclass
class MetricReport:
    metrics: dict[str, dict]
    records: list[QuestionRecord]
    config: dict
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "metrics": self.metrics,
            "notes": self.notes,
            "records": [r.to_dict() for r in self.records],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def render_text(self) -> str:
        lines = ["task                 metric               value",
                 "-" * 48]
        for task in sorted(self.metrics):
            for name in sorted(self.metrics[task]):
                value = self.metrics[task][name]
                shown = f"{value:.4f}" if isinstance(value, float) else str(value)
                lines.append(f"{task:<20} {name:<20} {shown}")
        lines.append("-" * 48)
        lines.append(f"questions: {len(self.records)}  "
                     f"invalid: {sum(1 for r in self.records if not r.valid)}")
        return "\n".join(lines)


def run_benchmark(client, questions: list[QuestionInstance], corpus: BenchCorpus,
                  retries: int = DEFAULT_RETRIES) -> MetricReport:
    if retries < 1:
        raise ArgumentError("retries must be >= 1")
    records: list[QuestionRecord] = []
    answers: dict[str, object] = {}
    by_qid = {q.qid: q for q in questions}

    for question in sorted(questions, key=lambda q: q.qid):
        record = QuestionRecord(qid=question.qid, task=question.task,
                                qtype=question.qtype, attempts=0, valid=False)
        int_range = question.meta.get("int_range")
        parsed = None
        for attempt in range(1, retries + 1):
            record.attempts = attempt
            try:
                raw = client.answer(question, attempt, corpus.images)
            except Exception as exc:  # transport failures count as attempts
                record.errors.append(f"attempt {attempt}: {exc}")
                continue
            parsed = extract_answer(
                raw, question.qtype,
                int_range=tuple(int_range) if int_range else None)
            if parsed is not None:
                break
            record.errors.append(f"attempt {attempt}: extraction failed")
        if parsed is not None:
            record.valid = True
            record.value = parsed.value
        records.append(record)
        answers[question.qid] = record

    metrics = _aggregate(by_qid, answers, corpus)
    report = MetricReport(
        metrics=metrics,
        records=records,
        config={"retries": retries, "n_questions": len(questions),
                "tasks": sorted({q.task for q in questions}),
                "corpus": corpus.ground_truth.get("config", {})},
        notes={
            "map@yes": "AP cutoff = number of yes-answered candidates, ranked "
                       "by yes-confidence (interpretation; see docs/bench.md)",
            "acc@5": "candidate-set protocol: true class counted when present "
                     "among the (<=5) ranked asserted candidates",
            "invalid_how": "invalid count answers score as 0 (maximum relative error)",
        },
    )
    return report


def _aggregate(questions: dict[str, QuestionInstance], answers: dict,
               corpus: BenchCorpus) -> dict[str, dict]:
    tasks = sorted({q.task for q in questions.values()})
    out: dict[str, dict] = {}
    for task in tasks:
        qs = {qid: q for qid, q in questions.items() if q.task == task}
        out[task] = _AGGREGATORS[task](qs, answers, corpus)
    return out


def _groups(qs: dict[str, QuestionInstance]) -> dict[str, list[QuestionInstance]]:
    grouped: dict[str, list[QuestionInstance]] = {}
    for qid in sorted(qs):
        q = qs[qid]
        grouped.setdefault(q.meta.get("group", qid), []).append(q)
    return grouped


def _agg_retrieval(qs, answers, corpus) -> dict:
    ranked_lists, relevance, yes_rankings = [], [], []
    yesno_correct, yesno_total = 0, 0
    for group, members in _groups(qs).items():
        how = [q for q in members if q.qtype == "how"]
        yn = [q for q in members if q.qtype == "yes-no"]
        if how:
            def prob(q):
                rec = answers[q.qid]
                return rec.value if rec.valid else -1
            order = sorted(how, key=lambda q: (-prob(q), q.meta["candidate"]))
            ranked_lists.append([q.meta["candidate_ref"] for q in order])
            relevance.append({q.meta["candidate_ref"] for q in how
                              if q.ground_truth["same_class"]})
            ref_of = {h.meta["candidate"]: h.meta["candidate_ref"] for h in how}
            yes_set = sorted(
                (q for q in yn if answers[q.qid].valid and answers[q.qid].value == "yes"),
                key=lambda q: q.meta["candidate"])
            yes_refs = [ref_of[q.meta["candidate"]] for q in yes_set]
            yes_rankings.append((yes_refs, len(yes_refs)))
        for q in yn:
            rec = answers[q.qid]
            yesno_total += 1
            yesno_correct += int(rec.valid and rec.value == q.ground_truth["answer"])
    result = metric_retrieval(ranked_lists, relevance, (1, 3, 5), yes_rankings)
    result["acc_yesno"] = yesno_correct / yesno_total if yesno_total else 0.0
    return result


def _agg_classification(qs, answers, corpus) -> dict:
    yn_correct = yn_total = how_correct = how_total = 0
    top1, top5 = [], []
    for group, members in _groups(qs).items():
        ranked = []
        truth_class = None
        for q in members:
            rec = answers[q.qid]
            if q.qtype == "yes-no":
                yn_total += 1
                yn_correct += int(rec.valid and rec.value == q.ground_truth["answer"])
            else:
                how_total += 1
                if rec.valid:
                    asserted_same = rec.value >= 50
                    how_correct += int(asserted_same == q.ground_truth["same_class"])
                truth_class = q.ground_truth.get("class_id", truth_class)
                if rec.valid:
                    ranked.append((
                        rec.value,
                        q.meta["candidate"],
                        "true" if q.ground_truth["same_class"] else "other",
                    ))
        if truth_class is not None:
            # asserted candidate labels in probability order; invalid answers
            # are not asserted, so a missing true-class answer scores wrong
            ranked.sort(key=lambda t: (-t[0], t[1]))
            asserted = [label for _, _, label in ranked]
            top1.append(("true", asserted))
            top5.append(("true", asserted))
    return {
        "acc": yn_correct / yn_total if yn_total else 0.0,
        "acc_how": how_correct / how_total if how_total else 0.0,
        "acc@1": metric_accuracy([a for _, a in top1], [t for t, _ in top1], "acc@1")
        if top1 else 0.0,
        "acc@5": metric_accuracy([a for _, a in top5], [t for t, _ in top5], "acc@5")
        if top5 else 0.0,
    }


def _agg_detection(qs, answers, corpus) -> dict:
    gt_counts, pred_counts = [], []
    mious = []
    for qid in sorted(qs):
        q = qs[qid]
        rec = answers[qid]
        if q.qtype == "how":
            gt_counts.append(q.ground_truth["count"])
            pred_counts.append(rec.value if rec.valid else 0)
        else:
            gt_boxes = [BoundingBox.from_list(b) for b in q.ground_truth["boxes"]]
            pred_boxes = ([BoundingBox.from_list(b) for b in rec.value]
                          if rec.valid else [])
            mious.append(metric_miou(gt_boxes, pred_boxes))
    mre = metric_mre(gt_counts, pred_counts)
    return {
        "mre": mre["mre"],
        "excluded_zero_gt": mre["excluded_zero_gt"],
        "miou": float(np.mean(mious)) if mious else 0.0,
    }


def _agg_modality(qs, answers, corpus) -> dict:
    predicted, truth = [], []
    for qid in sorted(qs):
        q = qs[qid]
        rec = answers[qid]
        truth.append(q.ground_truth["modality"])
        predicted.append(MODALITY_OPTIONS.get(rec.value, "invalid") if rec.valid else "invalid")
    return {
        "acc@1": metric_accuracy(predicted, truth, "acc"),
        "macro_precision": metric_accuracy(predicted, truth, "macro-precision"),
        "macro_recall": metric_accuracy(predicted, truth, "macro-recall"),
    }


def _agg_generation(qs, answers, corpus) -> dict:
    ssims = []
    for qid in sorted(qs):
        q = qs[qid]
        rec = answers[qid]
        target = corpus.images[q.ground_truth["target_ref"]]
        if rec.valid and isinstance(rec.value, RasterImage) \
                and (rec.value.width, rec.value.height) == (target.width, target.height):
            ssims.append(metric_ssim(rec.value, target))
        else:
            ssims.append(0.0)
    return {"ssim_mean": float(np.mean(ssims)) if ssims else 0.0}


def _agg_case_retrieval(qs, answers, corpus) -> dict:
    per_group = []
    for group, members in _groups(qs).items():
        pred_instances, real_instances = [], []
        for q in members:
            rec = answers[q.qid]
            fid = q.ground_truth["fragment_id"]
            real_instances.extend([fid] * q.ground_truth["count"])
            pred = rec.value if rec.valid and isinstance(rec.value, int) and rec.value >= 0 else 0
            pred_instances.extend([fid] * pred)
        if not real_instances:
            continue
        per_group.append(metric_prf_coverage(pred_instances, real_instances))
    if not per_group:
        return {"precision": 0.0, "recall": 0.0, "f1": 0.0, "coverage": 0.0}
    return {
        key: float(np.mean([g[key] for g in per_group]))
        for key in ("precision", "recall", "f1", "coverage")
    }


_AGGREGATORS = {
    "retrieval": _agg_retrieval,
    "classification": _agg_classification,
    "detection": _agg_detection,
    "modality": _agg_modality,
    "generation": _agg_generation,
    "case-retrieval": _agg_case_retrieval,
}

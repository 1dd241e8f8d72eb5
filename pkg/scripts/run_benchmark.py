"""Run the full benchmark on a fresh synthetic corpus and compare the
ground-truth oracle row against the deterministic tool suite row.

Usage: python scripts/run_benchmark.py [--fragments 20] [--seed 7] [--out report.json]
"""

import argparse
import json

from scriptorium.bench.clients import OracleClient, ToolClient
from scriptorium.bench.questions import BenchCorpus, generate_questions
from scriptorium.bench.runner import run_benchmark
from scriptorium.kb.snapshot import KbSnapshot
from scriptorium.synth.config import SynthConfig
from scriptorium.synth.corpus import generate_corpus

TASK_N = {"retrieval": 8, "classification": 24, "detection": 20,
          "modality": 40, "generation": 8, "case-retrieval": 8}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--fragments", type=int, default=20)
    parser.add_argument("--classes", type=int, default=10)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--noise", default="low")
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    config = SynthConfig(master_seed=args.seed, n_classes=args.classes,
                         n_fragments=args.fragments, noise=args.noise)
    payload = generate_corpus(config)
    snapshot = KbSnapshot()
    snapshot.ingest_payload(payload)
    snapshot.build_indexes()
    corpus = BenchCorpus.from_payload(payload)

    questions = []
    for task, n in TASK_N.items():
        questions += generate_questions(corpus, task, n, args.seed)
    print(f"corpus: {args.fragments} fragments, {args.classes} classes, "
          f"noise={args.noise}; {len(questions)} questions\n")

    reports = {}
    for name, client in (("oracle", OracleClient()), ("tool-suite", ToolClient(snapshot))):
        report = run_benchmark(client, questions, corpus)
        reports[name] = report
        print(f"== client: {name}")
        print(report.render_text())
        print()

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({name: r.to_dict() for name, r in reports.items()}, fh, indent=2)
        print(f"reports -> {args.out}")


if __name__ == "__main__":
    main()

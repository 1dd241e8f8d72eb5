"""Command-line entry points: synth, ingest, serve, bench, query.

Exit codes: 0 success, 1 usage error, 2 runtime error.

Environment: SCRIPTORIUM_KB_DIR (default snapshot dir), SCRIPTORIUM_BIND
(default host:port), SCRIPTORIUM_LLM_MODE/URL/KEY (LLM backend).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .agent.catalog import build_catalog
from .agent.llm import LlmConfig, make_client
from .agent.loop import run_turn
from .agent.state import SessionState
from .bench.clients import OracleClient, RemoteClient, ScriptedClient
from .bench.questions import TASKS, BenchCorpus, generate_questions
from .bench.runner import run_benchmark
from .errors import ScriptoriumError
from .images import RasterImage
from .kb.snapshot import KbSnapshot, load_snapshot, save_snapshot
from .synth.config import NOISE_LEVELS, SynthConfig
from .synth.corpus import generate_corpus

USAGE_EXIT = 1
RUNTIME_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def _build_parser() -> _Parser:
    parser = _Parser(prog="scriptorium",
                     description="Ancient-script knowledge base, tools, and agent.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus payload directory")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--classes", type=int, default=10)
    p.add_argument("--fragments", type=int, default=20)
    p.add_argument("--noise", choices=NOISE_LEVELS, default="low")
    p.add_argument("--documents", type=int, default=6)
    p.add_argument("--out", required=True, help="output snapshot directory")

    p = sub.add_parser("ingest", help="validate records and write the snapshot manifest")
    p.add_argument("directory", help="payload/snapshot directory (from synth)")
    p.add_argument("--out", default=None,
                   help="write the validated snapshot here (default: in place)")

    p = sub.add_parser("serve", help="serve the HTTP API over a snapshot")
    p.add_argument("--kb", default=os.environ.get("SCRIPTORIUM_KB_DIR"),
                   help="snapshot directory (or env SCRIPTORIUM_KB_DIR)")
    p.add_argument("--bind", default=os.environ.get("SCRIPTORIUM_BIND", "127.0.0.1:8000"))

    p = sub.add_parser("bench", help="run the benchmark harness")
    p.add_argument("--kb", default=os.environ.get("SCRIPTORIUM_KB_DIR"))
    p.add_argument("--task", choices=list(TASKS) + ["all"], default="all")
    p.add_argument("--n", type=int, default=None,
                   help="questions per task (defaults per task)")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--client", choices=("oracle", "scripted", "remote"), default="oracle")
    p.add_argument("--retries", type=int, default=3)
    p.add_argument("--out", default=None, help="write the JSON report here")

    p = sub.add_parser("query", help="run one agent turn against a snapshot")
    p.add_argument("--kb", default=os.environ.get("SCRIPTORIUM_KB_DIR"))
    p.add_argument("text", help="the query text")
    p.add_argument("--image", action="append", default=[], help="PNG path (repeatable)")
    p.add_argument("--trace", action="store_true", help="print the JSON trace")
    return parser


DEFAULT_BENCH_N = {
    "retrieval": 8,
    "classification": 24,
    "detection": 20,
    "modality": 40,
    "generation": 8,
    "case-retrieval": 8,
}


def _load_kb(directory: str | None) -> KbSnapshot:
    if not directory:
        raise ScriptoriumError("no snapshot directory: pass --kb or set SCRIPTORIUM_KB_DIR")
    snapshot = load_snapshot(directory)
    snapshot.build_indexes()
    return snapshot


def _cmd_synth(args) -> int:
    config = SynthConfig(master_seed=args.seed, n_classes=args.classes,
                         n_fragments=args.fragments, noise=args.noise,
                         n_documents=args.documents)
    payload = generate_corpus(config)
    snapshot = KbSnapshot()
    reports = snapshot.ingest_payload(payload)
    rejected = sum(r.rejected_count for r in reports.values())
    if rejected:
        print(f"generator payload had {rejected} rejected records", file=sys.stderr)
        return RUNTIME_EXIT
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    # persist stores + images + sidecar without a manifest; `ingest` seals it
    manifest = save_snapshot(snapshot, out)
    (out / "manifest.json").unlink()
    total = sum(v.get("records", 0) for v in manifest["files"].values())
    print(f"wrote payload: {total} records, "
          f"{sum(1 for f in manifest['files'] if f.startswith('images/'))} images -> {out}")
    return 0


def _cmd_ingest(args) -> int:
    src = Path(args.directory)
    if not src.is_dir():
        raise ScriptoriumError(f"{src} is not a directory")
    snapshot = KbSnapshot()
    images_dir = src / "images"
    images = {}
    if images_dir.is_dir():
        for path in sorted(images_dir.rglob("*.png")):
            ref = path.relative_to(images_dir).as_posix()
            images[ref] = RasterImage.from_png_bytes(path.read_bytes())
    snapshot.add_images(images)
    gt = src / "ground_truth.json"
    if gt.is_file():
        snapshot.ground_truth = json.loads(gt.read_text(encoding="utf-8"))

    from .kb.records import RECORD_FAMILIES
    from .kb.snapshot import FAMILY_ORDER
    total_accepted, total_rejected = 0, 0
    for family in FAMILY_ORDER:
        path = src / "stores" / f"{family}.jsonl"
        if not path.is_file():
            continue
        records = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()
                   if line.strip()]
        report = snapshot.ingest_store(family, records)
        total_accepted += report.accepted
        total_rejected += report.rejected_count
        for reject in report.rejected:
            print(f"rejected {family}/{reject.key}: {reject.reason}", file=sys.stderr)
    out = Path(args.out) if args.out else src
    save_snapshot(snapshot, out)
    print(f"ingested {total_accepted} records ({total_rejected} rejected) -> {out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    snapshot = _load_kb(args.kb)
    app = create_app(snapshot, LlmConfig.from_env())
    host, _, port = args.bind.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def _cmd_bench(args) -> int:
    snapshot = _load_kb(args.kb)
    corpus = BenchCorpus.from_snapshot(snapshot)
    tasks = list(TASKS) if args.task == "all" else [args.task]
    questions = []
    for task in tasks:
        n = args.n if args.n is not None else DEFAULT_BENCH_N[task]
        questions.extend(generate_questions(corpus, task, n, args.seed))
    if args.client == "oracle":
        client = OracleClient()
    elif args.client == "scripted":
        client = ScriptedClient()
    else:
        client = RemoteClient(make_client(LlmConfig.from_env()))
    report = run_benchmark(client, questions, corpus, retries=args.retries)
    print(report.render_text())
    if args.out:
        Path(args.out).write_text(report.to_json(), encoding="utf-8")
        print(f"report -> {args.out}")
    return 0


def _cmd_query(args) -> int:
    snapshot = _load_kb(args.kb)
    catalog = build_catalog(snapshot)
    state = SessionState("cli")
    images = [(Path(p).name, RasterImage.from_png_bytes(Path(p).read_bytes()))
              for p in args.image]
    outcome = run_turn(state, snapshot, catalog, args.text, images,
                       make_client(LlmConfig.from_env()))
    print(outcome.response_text)
    if args.trace:
        print(json.dumps(outcome.trace, indent=2))
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "ingest": _cmd_ingest,
    "serve": _cmd_serve,
    "bench": _cmd_bench,
    "query": _cmd_query,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_EXIT
    try:
        return _COMMANDS[args.command](args)
    except ScriptoriumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    raise SystemExit(main())

"""Two-turn interactive walkthrough on a synthetic knowledge base:
turn 1 analyzes an uploaded rubbing end to end, turn 2 asks a follow-up
about one detected character without re-uploading anything.

Usage: python scripts/demo_session.py [--seed 7]
"""

import argparse
import json

from scriptorium.agent.catalog import build_catalog
from scriptorium.agent.loop import run_turn
from scriptorium.agent.state import SessionState
from scriptorium.kb.snapshot import KbSnapshot
from scriptorium.synth.config import SynthConfig
from scriptorium.synth.corpus import generate_corpus


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    payload = generate_corpus(SynthConfig(master_seed=args.seed, n_classes=8,
                                          n_fragments=10, noise="low"))
    snapshot = KbSnapshot()
    snapshot.ingest_payload(payload)
    snapshot.build_indexes()
    catalog = build_catalog(snapshot)

    state = SessionState("demo")
    fragment_id = sorted(snapshot.rubbings)[3]
    rubbing = snapshot.images[snapshot.rubbings[fragment_id].image_ref]

    print(f"uploading rubbing of {fragment_id} "
          f"({rubbing.width}x{rubbing.height})\n")
    first = run_turn(state, snapshot, catalog,
                     "Please analyze this rubbing and interpret the inscription.",
                     [("upload.png", rubbing)])
    print("=== turn 1: analysis ===")
    for event in first.trace:
        if event["event"] in ("perceive", "plan"):
            print(json.dumps({k: v for k, v in event.items() if k != "ts"}))
    print(first.response_text)

    print("\n=== turn 2: follow-up on the first character (no re-upload) ===")
    second = run_turn(state, snapshot, catalog,
                      "Which catalogues record the first character from the last response?")
    for event in second.trace:
        if event["event"] in ("perceive", "plan"):
            print(json.dumps({k: v for k, v in event.items() if k != "ts"}))
    print(second.response_text)

    print(f"\nsession: {state.t} turns, {len(state.artifacts)} artifacts")


if __name__ == "__main__":
    main()

"""Benchmark question generation from a ground-truth corpus.

Question text instantiates fixed templates byte-for-byte (image slots and
options aside). Generation is deterministic in (corpus, task, n, seed).

Task shapes:
  retrieval       n query groups; per group one relevant + (C-1) distractor
                  crops, a probability ("how") question per candidate plus
                  balanced yes-no questions on the relevant and one distractor
  classification  n instances in groups of 4: one crop paired with its
                  true-class standard (intra) and a distractor standard
                  (inter), each pair asked as yes-no and as probability,
                  so intra/inter instances balance 50/50
  detection       n instances split between count ("how") and box ("where")
                  questions over distinct fragments
  modality        n four-option "which" questions, evenly covering the four
                  modalities
  generation      n transform-to-facsimile questions with the paired
                  facsimile as target
  case-retrieval  n class groups; per group a count question per candidate
                  fragment (predictions form the occurrence multiset)
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ArgumentError
from ..images import RasterImage
from ..synth.config import rng_for

CLS_SYSTEM = ("You are a senior oracle bone researcher who excels in "
              "classifying oracle bone characters.")
HOW_PAIR_USER = ("Given the following two oracle bone characters, estimate the "
                 "probability that they belong to the same class. Please return "
                 "only a single integer between 0 and 100. <image1> <image2>")
YESNO_PAIR_USER = ("Whether these two oracle bone characters belong to the same "
                   "class? Please return \"Yes\" or \"No\". <image1> <image2>")
MODALITY_SYSTEM = ("You are a senior oracle bone researcher who excels in "
                   "classifying the modality of oracle bone images.")
MODALITY_USER = ("Which modality is this oracle bone image belong to? <image1>\n"
                 "A. Whole Rubbing Image.\n"
                 "B. Whole Facsimile Image.\n"
                 "C. Single Character Rubbing Image.\n"
                 "D. Single Character Facsimile Image.")
DET_SYSTEM = ("You are a senior oracle bone researcher who excels in detecting "
              "characters on oracle bone script images.")
DET_HOW_USER = ("How many oracle bone characters are in this image? Please "
                "return the number of oracle bone characters in this image. <image1>")
DET_WHERE_USER = ("How many oracle bone characters are in this image? For each "
                  "detected oracle bone character, please return a bounding box "
                  "in [xmin, ymin, xmax, ymax] format. <image1>")
GEN_USER = "Please transform this picture into a facsimile."
OCCURRENCE_USER = ("How many times does the character shown in <image1> appear "
                   "on fragment {fragment_id}? Please return only a single integer.")

MODALITY_OPTIONS = {
    "A": "whole-rubbing",
    "B": "whole-facsimile",
    "C": "single-rubbing",
    "D": "single-facsimile",
}

RETRIEVAL_CANDIDATES = 6
TASKS = ("retrieval", "classification", "detection", "modality",
         "generation", "case-retrieval")


def _prompt(system: str, user: str) -> str:
    return f"#System: {system}\n#User: {user}"


@dataclass(frozen=True)
class QuestionInstance:
    qid: str
    task: str
    qtype: str
    prompt: str
    image_refs: tuple[str, ...]
    ground_truth: dict
    meta: dict = field(default_factory=dict)


@dataclass
class BenchCorpus:
    """Images plus the generator's ground-truth sidecar."""

    images: dict[str, RasterImage]
    ground_truth: dict

    @classmethod
    def from_snapshot(cls, snapshot) -> "BenchCorpus":
        if not snapshot.ground_truth:
            raise ArgumentError("snapshot has no ground-truth sidecar; "
                                "benchmarks need a synthetic corpus")
        return cls(images=snapshot.images, ground_truth=snapshot.ground_truth)

    @classmethod
    def from_payload(cls, payload) -> "BenchCorpus":
        return cls(images=payload.images, ground_truth=payload.ground_truth)

    def fragments(self) -> dict:
        return self.ground_truth["fragments"]

    def char_entries(self) -> list[dict]:
        out = []
        for frag_id in sorted(self.fragments()):
            for char in self.fragments()[frag_id]["chars"]:
                out.append({**char, "fragment_id": frag_id})
        return out

    def class_occurrences(self) -> dict:
        return self.ground_truth["class_occurrences"]

    def standards_of(self, class_id: str) -> list[str]:
        refs = [ref for ref in self.images if ref.startswith(f"standards/{class_id}_")]
        return sorted(refs)

    def modality_labels(self) -> dict[str, str]:
        return self.ground_truth["modality_labels"]


def generate_questions(corpus: BenchCorpus, task: str, n: int, seed: int) -> list[QuestionInstance]:
    if task not in TASKS:
        raise ArgumentError(f"unknown task {task!r}; expected one of {TASKS}")
    if n < 1:
        raise ArgumentError("n must be >= 1")
    rng = rng_for(seed, "bench", task)
    maker = {
        "retrieval": _retrieval_questions,
        "classification": _classification_questions,
        "detection": _detection_questions,
        "modality": _modality_questions,
        "generation": _generation_questions,
        "case-retrieval": _case_retrieval_questions,
    }[task]
    return maker(corpus, n, rng)


def _char_crop_pool(corpus: BenchCorpus, min_chars: int) -> list[dict]:
    chars = corpus.char_entries()
    if len(chars) < min_chars:
        raise ArgumentError(
            f"corpus has {len(chars)} character crops; task needs at least {min_chars}")
    return chars


def _pick_other_class(rng, classes: list[str], avoid: str) -> str:
    others = [c for c in classes if c != avoid]
    if not others:
        raise ArgumentError("task needs at least 2 glyph classes")
    return others[int(rng.integers(0, len(others)))]


def _retrieval_questions(corpus: BenchCorpus, n: int, rng) -> list[QuestionInstance]:
    chars = _char_crop_pool(corpus, 2)
    classes = sorted(corpus.class_occurrences())
    questions = []
    for g in range(n):
        query = chars[int(rng.integers(0, len(chars)))]
        relevant_ref = corpus.standards_of(query["class_id"])
        if not relevant_ref:
            raise ArgumentError(f"no standard image for class {query['class_id']}")
        candidates = [(relevant_ref[0], query["class_id"], True)]
        while len(candidates) < RETRIEVAL_CANDIDATES:
            cls = _pick_other_class(rng, classes, query["class_id"])
            refs = corpus.standards_of(cls)
            ref = refs[int(rng.integers(0, len(refs)))]
            if all(ref != c[0] for c in candidates):
                candidates.append((ref, cls, False))
        order = rng.permutation(len(candidates))
        candidates = [candidates[int(i)] for i in order]
        relevant_pos = next(i for i, c in enumerate(candidates) if c[2])

        for j, (ref, cls, is_rel) in enumerate(candidates):
            questions.append(QuestionInstance(
                qid=f"retrieval-{g:04d}-how-{j:02d}", task="retrieval", qtype="how",
                prompt=_prompt(CLS_SYSTEM, HOW_PAIR_USER),
                image_refs=(query["crop_ref"], ref),
                ground_truth={"same_class": is_rel, "probability": 100 if is_rel else 0},
                meta={"group": f"retrieval-{g:04d}", "candidate": j,
                      "candidate_ref": ref, "int_range": [0, 100]},
            ))
        distractor_pos = (relevant_pos + 1) % len(candidates)
        for j in (relevant_pos, distractor_pos):
            ref, cls, is_rel = candidates[j]
            questions.append(QuestionInstance(
                qid=f"retrieval-{g:04d}-yn-{j:02d}", task="retrieval", qtype="yes-no",
                prompt=_prompt(CLS_SYSTEM, YESNO_PAIR_USER),
                image_refs=(query["crop_ref"], ref),
                ground_truth={"same_class": is_rel, "answer": "yes" if is_rel else "no"},
                meta={"group": f"retrieval-{g:04d}", "candidate": j},
            ))
    return questions


def _classification_questions(corpus: BenchCorpus, n: int, rng) -> list[QuestionInstance]:
    if n % 4:
        raise ArgumentError("classification n must be a multiple of 4 "
                            "(each query crop yields 4 balanced instances)")
    chars = _char_crop_pool(corpus, 1)
    classes = sorted(corpus.class_occurrences())
    questions = []
    for g in range(n // 4):
        query = chars[int(rng.integers(0, len(chars)))]
        true_ref = corpus.standards_of(query["class_id"])[0]
        other_cls = _pick_other_class(rng, classes, query["class_id"])
        other_ref = corpus.standards_of(other_cls)[0]
        # seeded position of the true-class candidate inside the group
        pair_order = [(true_ref, True), (other_ref, False)]
        if int(rng.integers(0, 2)):
            pair_order.reverse()
        for j, (ref, is_same) in enumerate(pair_order):
            base = f"classification-{g:04d}-{j}"
            questions.append(QuestionInstance(
                qid=f"{base}-yn", task="classification", qtype="yes-no",
                prompt=_prompt(CLS_SYSTEM, YESNO_PAIR_USER),
                image_refs=(query["crop_ref"], ref),
                ground_truth={"same_class": is_same, "answer": "yes" if is_same else "no"},
                meta={"group": f"classification-{g:04d}", "candidate": j},
            ))
            questions.append(QuestionInstance(
                qid=f"{base}-how", task="classification", qtype="how",
                prompt=_prompt(CLS_SYSTEM, HOW_PAIR_USER),
                image_refs=(query["crop_ref"], ref),
                ground_truth={"same_class": is_same, "probability": 100 if is_same else 0,
                              "class_id": query["class_id"]},
                meta={"group": f"classification-{g:04d}", "candidate": j,
                      "candidate_same": is_same, "int_range": [0, 100]},
            ))
    return questions


def _detection_questions(corpus: BenchCorpus, n: int, rng) -> list[QuestionInstance]:
    frag_ids = sorted(corpus.fragments())
    need = (n + 1) // 2
    if len(frag_ids) < need:
        raise ArgumentError(
            f"detection with n={n} needs at least {need} fragments, corpus has {len(frag_ids)}")
    chosen = [frag_ids[int(i)] for i in rng.permutation(len(frag_ids))[:need]]
    questions = []
    for i in range(n):
        frag = corpus.fragments()[chosen[i // 2]]
        if i % 2 == 0:
            questions.append(QuestionInstance(
                qid=f"detection-{i:04d}-how", task="detection", qtype="how",
                prompt=_prompt(DET_SYSTEM, DET_HOW_USER),
                image_refs=(frag["rubbing_ref"],),
                ground_truth={"count": frag["char_count"]},
                meta={"fragment_id": chosen[i // 2]},
            ))
        else:
            questions.append(QuestionInstance(
                qid=f"detection-{i:04d}-where", task="detection", qtype="where",
                prompt=_prompt(DET_SYSTEM, DET_WHERE_USER),
                image_refs=(frag["rubbing_ref"],),
                ground_truth={"boxes": [c["bbox"] for c in frag["chars"]]},
                meta={"fragment_id": chosen[i // 2]},
            ))
    return questions


def _modality_questions(corpus: BenchCorpus, n: int, rng) -> list[QuestionInstance]:
    labels = corpus.modality_labels()
    by_modality: dict[str, list[str]] = {m: [] for m in MODALITY_OPTIONS.values()}
    for ref in sorted(labels):
        by_modality[labels[ref]].append(ref)
    per = n // 4
    if n % 4:
        raise ArgumentError("modality n must be a multiple of 4")
    for modality, refs in by_modality.items():
        if len(refs) < per:
            raise ArgumentError(
                f"modality task needs {per} {modality} images, corpus has {len(refs)}")
    questions = []
    i = 0
    for letter, modality in MODALITY_OPTIONS.items():
        refs = by_modality[modality]
        picks = [refs[int(j)] for j in rng.permutation(len(refs))[:per]]
        for ref in picks:
            questions.append(QuestionInstance(
                qid=f"modality-{i:04d}", task="modality", qtype="which",
                prompt=_prompt(MODALITY_SYSTEM, MODALITY_USER),
                image_refs=(ref,),
                ground_truth={"modality": modality, "option": letter},
                meta={},
            ))
            i += 1
    return questions


def _generation_questions(corpus: BenchCorpus, n: int, rng) -> list[QuestionInstance]:
    frag_ids = sorted(corpus.fragments())
    if len(frag_ids) < n:
        raise ArgumentError(
            f"generation with n={n} needs {n} fragments, corpus has {len(frag_ids)}")
    chosen = [frag_ids[int(i)] for i in rng.permutation(len(frag_ids))[:n]]
    return [
        QuestionInstance(
            qid=f"generation-{i:04d}", task="generation", qtype="generate",
            prompt=GEN_USER,
            image_refs=(corpus.fragments()[fid]["rubbing_ref"],),
            ground_truth={"target_ref": corpus.fragments()[fid]["facsimile_ref"]},
            meta={"fragment_id": fid},
        )
        for i, fid in enumerate(chosen)
    ]


CASE_CANDIDATES = 12


def _case_retrieval_questions(corpus: BenchCorpus, n: int, rng) -> list[QuestionInstance]:
    occurrences = corpus.class_occurrences()
    classes = sorted(cid for cid, frags in occurrences.items() if frags)
    if not classes:
        raise ArgumentError("case-retrieval needs at least one attested class")
    frag_ids = sorted(corpus.fragments())
    questions = []
    for g in range(n):
        cid = classes[g % len(classes)]
        positives = sorted(occurrences[cid])
        negatives = [f for f in frag_ids if f not in occurrences[cid]]
        pick = [negatives[int(i)] for i in
                rng.permutation(len(negatives))[:max(0, CASE_CANDIDATES - len(positives))]]
        candidates = sorted(positives + pick)
        std = corpus.standards_of(cid)[0]
        for j, fid in enumerate(candidates):
            count = occurrences[cid].get(fid, 0)
            questions.append(QuestionInstance(
                qid=f"case-retrieval-{g:04d}-{j:02d}", task="case-retrieval", qtype="how",
                prompt=_prompt(CLS_SYSTEM, OCCURRENCE_USER.format(fragment_id=fid)),
                image_refs=(std,),
                ground_truth={"count": count, "class_id": cid, "fragment_id": fid},
                meta={"group": f"case-retrieval-{g:04d}", "class_id": cid,
                      "fragment_id": fid},
            ))
    return questions

"""Slot prediction: which slot does a word in context fill?

A multinomial linear classifier over character n-grams of the target word
(boundary-marked, n = 1..4) plus the masked left/right context identities.
Classes are the slot ids seen in training; trained by seeded SGD.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .align import SlotAssignment, SlotID
from .corpus import Corpus, ContextSample, extract_contexts, mask_rare

MAX_NGRAM = 4


@dataclass(frozen=True)
class PredictorExample:
    features: ContextSample
    label_pos: int
    label_slot: SlotID


@dataclass
class SlotPredictor:
    feature_index: dict[str, int]
    classes: list[SlotID]
    weights: np.ndarray  # (n_classes, n_features + 1); last column is the bias
    class_support: np.ndarray


@dataclass
class SlotPrediction:
    pos: int
    source_slot: SlotID
    target_slots: list[SlotID]


def context_features(word: str, left: str, right: str, max_n: int = MAX_NGRAM) -> list[str]:
    """Deduplicated, sorted feature names for one example."""
    padded = f"^{word}$"
    feats = {
        f"ng:{padded[i : i + n]}"
        for n in range(1, max_n + 1)
        for i in range(len(padded) - n + 1)
    }
    feats.add(f"L:{left}")
    feats.add(f"R:{right}")
    return sorted(feats)


def build_training_data(
    corpus: Corpus,
    assignment: SlotAssignment,
    max_contexts: int = 5,
    alpha: int = 50,
) -> list[PredictorExample]:
    """One example per (slot-assigned form, masked context window).

    Forms absent from the corpus contribute nothing. Deterministic: forms
    are visited in sorted (cluster id, form) order, contexts in corpus
    order.
    """
    examples: list[PredictorExample] = []
    for cid, form in sorted(assignment.form_slots):
        slot = assignment.form_slots[(cid, form)]
        for ctx in extract_contexts(corpus, form, max_contexts):
            masked = mask_rare(ctx, corpus, alpha)
            examples.append(PredictorExample(masked, slot.pos, slot))
    return examples


def train_predictor(
    examples: list[PredictorExample],
    epochs: int = 10,
    seed: int = 0,
    lr: float = 0.5,
) -> SlotPredictor:
    """Softmax regression by SGD; same seed, same weights."""
    if not examples:
        raise ValueError("train_predictor needs at least one example")
    classes = sorted({e.label_slot for e in examples})
    class_index = {s: i for i, s in enumerate(classes)}
    feature_index: dict[str, int] = {}
    rows: list[np.ndarray] = []
    labels: list[int] = []
    for e in examples:
        feats = context_features(e.features.target, e.features.left, e.features.right)
        for f in feats:
            feature_index.setdefault(f, len(feature_index))
        rows.append(np.array([feature_index[f] for f in feats], dtype=np.int64))
        labels.append(class_index[e.label_slot])
    y = np.array(labels, dtype=np.int64)
    support = np.bincount(y, minlength=len(classes))
    weights = np.zeros((len(classes), len(feature_index) + 1))
    bias_col = len(feature_index)
    rng = np.random.default_rng(seed)
    for _ in range(epochs):
        for i in rng.permutation(len(rows)):
            idxs = rows[i]
            scores = weights[:, idxs].sum(axis=1) + weights[:, bias_col]
            scores -= scores.max()
            probs = np.exp(scores)
            probs /= probs.sum()
            probs[y[i]] -= 1.0
            weights[:, idxs] -= lr * probs[:, None]
            weights[:, bias_col] -= lr * probs
    return SlotPredictor(feature_index, classes, weights, support)


def predict(
    predictor: SlotPredictor,
    word: str,
    context: ContextSample,
    assignment: SlotAssignment,
) -> SlotPrediction:
    """Predict the source slot of a word in a (masked) context.

    Ties go to the class with larger training support, then the smaller
    slot id. A word contributing no known features falls back to the
    bias/support ordering, i.e. the class prior argmax.
    """
    feats = context_features(word, context.left, context.right)
    idxs = np.array(
        [predictor.feature_index[f] for f in feats if f in predictor.feature_index],
        dtype=np.int64,
    )
    scores = predictor.weights[:, -1].copy()
    if len(idxs):
        scores += predictor.weights[:, idxs].sum(axis=1)
    order = sorted(
        range(len(predictor.classes)),
        key=lambda c: (-scores[c], -predictor.class_support[c], predictor.classes[c]),
    )
    slot = predictor.classes[order[0]]
    targets = list(assignment.pos_slots.get(slot.pos, [slot]))
    return SlotPrediction(slot.pos, slot, targets)


def save_predictions(
    predictions: list[tuple[str, SlotPrediction]], path: str, header: str | None = None
) -> None:
    """Rows of '<target> <pos> <source_slot> <slot1,slot2,...>' (tab-separated)."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        for word, pred in predictions:
            slots = ",".join(str(s) for s in pred.target_slots)
            fh.write(f"{word}\t{pred.pos}\t{pred.source_slot}\t{slots}\n")


def load_predictions(path: str) -> list[tuple[str, SlotPrediction]]:
    from .align import parse_slot
    from .errors import DataError

    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read predictions {path}: {exc}") from None
    out: list[tuple[str, SlotPrediction]] = []
    in_header = True
    for lineno, line in enumerate(lines, start=1):
        if in_header and line.startswith("#"):
            continue
        in_header = False
        parts = line.split("\t")
        if len(parts) != 4:
            raise DataError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
        try:
            pos = int(parts[1])
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-integer pos") from None
        slots = [parse_slot(s) for s in parts[3].split(",")] if parts[3] else []
        out.append((parts[0], SlotPrediction(pos, parse_slot(parts[2]), slots)))
    return out

"""Subword skip-gram embeddings with negative sampling.

Every corpus type gets a vector: the sum of its word vector and its
boundary-marked character n-gram (3..6 by default) vectors. Training is
skip-gram with negative sampling over dynamic windows; updates are applied
in deterministic minibatches, so the same seed reproduces the same table
bit for bit on one machine.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .abstract import AbstractForm
from .corpus import Corpus
from .errors import DataError, MissingEmbeddingError


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray]


@dataclass
class AbstractFormVector:
    pattern: str
    vector: np.ndarray


def _char_ngrams(word: str, min_n: int, max_n: int) -> list[str]:
    padded = f"<{word}>"
    grams: list[str] = []
    for n in range(min_n, max_n + 1):
        for i in range(len(padded) - n + 1):
            grams.append(padded[i : i + n])
    return grams


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -30.0, 30.0)))


def train_embeddings(
    corpus: Corpus,
    dim: int = 100,
    window: int = 5,
    epochs: int = 5,
    seed: int = 0,
    negatives: int = 5,
    lr: float = 0.05,
    min_n: int = 3,
    max_n: int = 6,
    batch_size: int = 128,
) -> EmbeddingTable:
    """Train a table with a vector for every corpus type.

    A corpus without co-occurrence pairs (e.g. only single-token sentences)
    leaves vectors at their seeded initialization.
    """
    if dim < 2 or window < 1 or epochs < 0 or negatives < 1:
        raise ValueError("bad embedding hyperparameters")
    words = sorted(corpus.type_counts)
    if not words:
        return EmbeddingTable(dim, {})
    windex = {w: i for i, w in enumerate(words)}
    units: list[list[int]] = [[windex[w]] for w in words]  # word id first, then grams
    gram_index: dict[str, int] = {}
    for i, w in enumerate(words):
        for g in _char_ngrams(w, min_n, max_n):
            gid = gram_index.setdefault(g, len(words) + len(gram_index))
            units[i].append(gid)
    pad = len(words) + len(gram_index)
    max_units = max(len(u) for u in units)
    sub = np.full((len(words), max_units), pad, dtype=np.int64)
    for i, u in enumerate(units):
        sub[i, : len(u)] = u

    rng = np.random.default_rng(seed)
    vin = (rng.random((pad + 1, dim)) - 0.5) / dim
    vin[pad] = 0.0
    vout = np.zeros((len(words), dim))

    freq = np.array([corpus.type_counts[w] for w in words], dtype=np.float64) ** 0.75
    neg_cdf = np.cumsum(freq / freq.sum())
    sent_ids = [np.array([windex[t] for t in s], dtype=np.int64) for s in corpus.sentences]
    labels_row = np.zeros(1 + negatives)
    labels_row[0] = 1.0

    for epoch in range(epochs):
        centers: list[np.ndarray] = []
        contexts: list[np.ndarray] = []
        for s in sent_ids:
            if len(s) < 2:
                continue
            spans = rng.integers(1, window + 1, size=len(s))
            for t in range(len(s)):
                lo = max(0, t - int(spans[t]))
                hi = min(len(s), t + int(spans[t]) + 1)
                ctx = np.concatenate([s[lo:t], s[t + 1 : hi]])
                if len(ctx):
                    centers.append(np.full(len(ctx), s[t]))
                    contexts.append(ctx)
        if not centers:
            continue
        cen = np.concatenate(centers)
        pos = np.concatenate(contexts)
        negs = np.searchsorted(neg_cdf, rng.random((len(cen), negatives)))
        n_pairs = len(cen)
        for start in range(0, n_pairs, batch_size):
            frac = (epoch + start / n_pairs) / epochs
            cur_lr = lr * max(1.0 - frac, 1e-4)
            rows = sub[cen[start : start + batch_size]]
            tgt = np.concatenate(
                [pos[start : start + batch_size, None], negs[start : start + batch_size]], axis=1
            )
            h = vin[rows].sum(axis=1)
            out = vout[tgt]
            scores = np.einsum("bd,bkd->bk", h, out)
            g = (_sigmoid(scores) - labels_row) * cur_lr
            grad_h = np.einsum("bk,bkd->bd", g, out)
            # Frequent tokens recur many times per batch; averaging each
            # row's accumulated gradient keeps its step at single-pair
            # scale, otherwise high-frequency rows oscillate and diverge.
            cnt_out = np.bincount(tgt.ravel(), minlength=len(words))
            np.add.at(vout, tgt, -(g / cnt_out[tgt])[:, :, None] * h[:, None, :])
            cnt_in = np.bincount(rows.ravel(), minlength=pad + 1)
            np.add.at(vin, rows, -grad_h[:, None, :] / cnt_in[rows][:, :, None])
            vin[pad] = 0.0

    table = {w: vin[sub[i]].sum(axis=0) for i, w in enumerate(words)}
    return EmbeddingTable(dim, table)


def save_embeddings(table: EmbeddingTable, path: str, header: str | None = None) -> None:
    """Write '<n_words> <dim>' then one space-separated row per word."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        fh.write(f"{len(table.vectors)} {table.dim}\n")
        for word in sorted(table.vectors):
            vals = " ".join(repr(float(v)) for v in table.vectors[word])
            fh.write(f"{word} {vals}\n")


def load_embeddings(path: str) -> EmbeddingTable:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read embeddings {path}: {exc}") from None
    idx = 0
    while idx < len(lines) and lines[idx].startswith("#"):
        idx += 1
    if idx >= len(lines):
        raise DataError(f"{path}: missing header line")
    head = lines[idx].split()
    if len(head) != 2:
        raise DataError(f"{path}:{idx + 1}: header must be '<n_words> <dim>'")
    try:
        n_words, dim = int(head[0]), int(head[1])
    except ValueError:
        raise DataError(f"{path}:{idx + 1}: non-integer header") from None
    vectors: dict[str, np.ndarray] = {}
    first_line: dict[str, int] = {}
    for lineno in range(idx + 1, len(lines)):
        line = lines[lineno]
        if not line:
            raise DataError(f"{path}:{lineno + 1}: empty row")
        parts = line.split(" ")
        if len(parts) != dim + 1:
            raise DataError(
                f"{path}:{lineno + 1}: expected {dim + 1} fields, got {len(parts)}"
            )
        word = parts[0]
        if word in vectors:
            raise DataError(
                f"{path}:{lineno + 1}: duplicate word {word!r} "
                f"(first seen at line {first_line[word]})"
            )
        try:
            vec = np.array([float(v) for v in parts[1:]])
        except ValueError:
            raise DataError(f"{path}:{lineno + 1}: non-numeric vector component") from None
        vectors[word] = vec
        first_line[word] = lineno + 1
    if len(vectors) != n_words:
        raise DataError(f"{path}: header claims {n_words} rows, file has {len(vectors)}")
    return EmbeddingTable(dim, vectors)


def abstract_form_vector(form: AbstractForm, table: EmbeddingTable) -> AbstractFormVector:
    """Mean embedding over the form's member types.

    Members missing from the table are skipped with a warning; if none
    remain, a MissingEmbeddingError is raised.
    """
    types = sorted({surface for _, surface in form.members})
    present = [t for t in types if t in table.vectors]
    absent = [t for t in types if t not in table.vectors]
    if absent:
        warnings.warn(
            f"pattern {form.pattern}: no vector for {len(absent)} member type(s), skipping",
            stacklevel=2,
        )
    if not present:
        raise MissingEmbeddingError(f"pattern {form.pattern}: no member has a vector")
    mean = np.mean([table.vectors[t] for t in present], axis=0)
    return AbstractFormVector(form.pattern, mean)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; zero vectors compare as 0.0."""
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))

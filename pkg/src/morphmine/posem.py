"""Coarse POS induction over abstract paradigms via a categorical mixture.

Each paradigm emits its set of patterns; a paradigm's joint score under
tag k is P(k) times the product of per-pattern emission probabilities.
Fitting is plain EM from seeded random responsibilities, so the observed
log-likelihood never decreases across iterations. The returned model
carries add-lambda smoothed emissions over the pattern vocabulary plus one
unseen cell, which keeps scores of unknown patterns finite.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .abstract import AbstractParadigm
from .errors import DataError

UNSEEN = "<unseen>"


@dataclass
class PosModel:
    n_tags: int
    priors: np.ndarray
    emissions: np.ndarray  # (n_tags, V + 1); last column is the unseen cell
    vocab: dict[str, int]
    smoothing: float
    loglik_trace: list[float] = field(default_factory=list)
    n_iters: int = 0


@dataclass
class PosAssignment:
    tag_of: dict[int, int]
    clusters_of: dict[int, set[int]]


def _pattern_matrix(paradigms: list[AbstractParadigm], vocab: dict[str, int]) -> np.ndarray:
    x = np.zeros((len(paradigms), len(vocab)))
    for i, p in enumerate(paradigms):
        for pattern in p.patterns:
            x[i, vocab[pattern]] += 1.0
    return x


def em_fit(
    paradigms: list[AbstractParadigm],
    n_tags: int = 3,
    max_iters: int = 100,
    tol: float = 1e-6,
    seed: int = 0,
    smoothing: float = 0.1,
) -> PosModel:
    """Fit the mixture by EM; deterministic given the seed.

    Stops when the relative log-likelihood improvement falls below tol or
    after max_iters iterations (one iteration = one E step + one M step).
    tol=inf therefore runs exactly one iteration. The trace records the
    log-likelihood at every evaluation and is non-decreasing.
    """
    if not paradigms:
        raise ValueError("em_fit needs at least one paradigm")
    if n_tags < 1:
        raise ValueError("n_tags must be >= 1")
    if n_tags > len(paradigms):
        warnings.warn(f"n_tags={n_tags} exceeds paradigm count {len(paradigms)}", stacklevel=2)
    vocab = {p: i for i, p in enumerate(sorted({pat for p in paradigms for pat in p.patterns}))}
    x = _pattern_matrix(paradigms, vocab)
    n, v = x.shape
    rng = np.random.default_rng(seed)
    resp = rng.random((n, n_tags)) + 1e-12
    resp /= resp.sum(axis=1, keepdims=True)

    def m_step(r: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        priors = r.sum(axis=0) / n
        counts = r.T @ x  # (K, V)
        totals = counts.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            emis = np.where(totals > 0, counts / np.where(totals > 0, totals, 1.0), 0.0)
        return priors, emis, counts

    priors, emis, counts = m_step(resp)
    trace: list[float] = []
    n_iters = 0
    prev_ll = None
    for _ in range(max_iters + 1):
        with np.errstate(divide="ignore"):
            log_prior = np.log(priors)
            log_emis = np.log(emis)
        # MLE emissions may hit exact zero once responsibilities underflow;
        # 0 * -inf in the matmul would give nan. Flooring keeps the joint
        # finite while exp(joint - max) still underflows to exactly 0, so
        # responsibilities and the trace match the exact computation.
        log_emis = np.maximum(log_emis, -1e6)
        joint = log_prior[None, :] + x @ log_emis.T  # (N, K)
        mx = joint.max(axis=1, keepdims=True)
        ll = float((mx[:, 0] + np.log(np.exp(joint - mx).sum(axis=1))).sum())
        trace.append(ll)
        if prev_ll is not None:
            denom = max(abs(prev_ll), 1e-12)
            if (ll - prev_ll) / denom < tol:
                break
        if n_iters == max_iters:
            break
        resp = np.exp(joint - mx)
        resp /= resp.sum(axis=1, keepdims=True)
        priors, emis, counts = m_step(resp)
        n_iters += 1
        prev_ll = ll

    lam = smoothing
    smoothed = np.concatenate([counts, np.zeros((n_tags, 1))], axis=1) + lam
    smoothed /= smoothed.sum(axis=1, keepdims=True)
    return PosModel(n_tags, priors, smoothed, vocab, lam, trace, n_iters)


def log_joint(model: PosModel, paradigm: AbstractParadigm, tag: int) -> float:
    """log P(tag) + sum of log emission probabilities of the paradigm's patterns.

    Patterns outside the training vocabulary fall into the smoothed unseen
    cell, so the result is always finite when the prior is positive.
    """
    if not 0 <= tag < model.n_tags:
        raise ValueError(f"tag {tag} out of range")
    unseen_col = model.emissions.shape[1] - 1
    total = float(np.log(model.priors[tag])) if model.priors[tag] > 0 else float("-inf")
    for pattern in sorted(paradigm.patterns):
        col = model.vocab.get(pattern, unseen_col)
        total += float(np.log(model.emissions[tag, col]))
    return total


def assign_pos(model: PosModel, paradigms: list[AbstractParadigm]) -> PosAssignment:
    """Assign each paradigm the argmax tag; ties go to the smallest tag."""
    tag_of: dict[int, int] = {}
    clusters_of: dict[int, set[int]] = {k: set() for k in range(model.n_tags)}
    for p in paradigms:
        scores = [log_joint(model, p, k) for k in range(model.n_tags)]
        best = max(range(model.n_tags), key=lambda k: (scores[k], -k))
        tag_of[p.cluster_id] = best
        clusters_of[best].add(p.cluster_id)
    return PosAssignment(tag_of, clusters_of)


def save_pos_model(model: PosModel, path: str, header: str | None = None) -> None:
    """Dump priors and per-tag emission rows; floats round-trip via repr."""
    inv = {i: p for p, i in model.vocab.items()}
    inv[len(model.vocab)] = UNSEEN
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        fh.write(f"ntags\t{model.n_tags}\n")
        fh.write(f"lambda\t{model.smoothing!r}\n")
        for k in range(model.n_tags):
            fh.write(f"prior\t{k}\t{float(model.priors[k])!r}\n")
        for k in range(model.n_tags):
            for col in range(model.emissions.shape[1]):
                fh.write(f"emit\t{k}\t{inv[col]}\t{float(model.emissions[k, col])!r}\n")


def load_pos_model(path: str) -> PosModel:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read model {path}: {exc}") from None
    n_tags = None
    lam = None
    priors: dict[int, float] = {}
    emits: list[tuple[int, str, float]] = []
    in_header = True
    for lineno, line in enumerate(lines, start=1):
        if in_header and line.startswith("#"):
            continue
        in_header = False
        parts = line.split("\t")
        try:
            if parts[0] == "ntags":
                n_tags = int(parts[1])
            elif parts[0] == "lambda":
                lam = float(parts[1])
            elif parts[0] == "prior":
                priors[int(parts[1])] = float(parts[2])
            elif parts[0] == "emit":
                emits.append((int(parts[1]), parts[2], float(parts[3])))
            else:
                raise ValueError(f"unknown record {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            raise DataError(f"{path}:{lineno}: bad model line: {exc}") from None
    if n_tags is None or lam is None or len(priors) != n_tags:
        raise DataError(f"{path}: incomplete model file")
    patterns = sorted({pat for _, pat, _ in emits if pat != UNSEEN})
    vocab = {p: i for i, p in enumerate(patterns)}
    emissions = np.zeros((n_tags, len(vocab) + 1))
    for k, pat, val in emits:
        col = len(vocab) if pat == UNSEEN else vocab[pat]
        emissions[k, col] = val
    prior_vec = np.array([priors[k] for k in range(n_tags)])
    return PosModel(n_tags, prior_vec, emissions, vocab, lam)

"""Best-match evaluation against gold paradigms, plus a synthetic harness.

Predicted slot labels are system-internal, so scoring first finds, per POS,
the injective label-to-MSD mapping that maximizes agreement, then counts
matches over all gold cells (micro average by default). bmf1 scores a
clustering the same way with per-cluster F1. The toy-language generator
builds a fully regular corpus whose gold paradigms are known, for
end-to-end checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cluster import Clustering
from .corpus import Corpus, build_corpus
from .errors import DataError
from .inflect import GeneratedParadigm

TOY_STEM_ALPHABET = "bdfgklnprz"  # shares no character with typical suffix sets
TOY_MARKERS = ("ma", "me", "mi", "mo", "mu", "my")


@dataclass
class GoldParadigm:
    lemma: str
    pos: str
    slots: dict[str, str]


@dataclass
class EvalReport:
    bmacc: float
    per_pos: dict[str, float]
    mapping: dict[str, dict[str, str]]
    n_gold_forms: int
    n_matched: int
    average: str = "micro"
    bmf1: float | None = None


@dataclass
class ToyLanguage:
    corpus: Corpus
    paradigms: list[GoldParadigm]
    clusters: list[set[str]]


def load_unimorph(path: str) -> list[GoldParadigm]:
    """Parse lemma<TAB>form<TAB>MSD triples into per-(lemma, POS) paradigms.

    POS is the first ';'-separated MSD feature. Paradigms containing any
    multiword form (internal space) are dropped. Repeated (lemma, POS, MSD)
    keeps the first form seen.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read gold file {path}: {exc}") from None
    order: list[tuple[str, str]] = []
    slots: dict[tuple[str, str], dict[str, str]] = {}
    in_header = True
    for lineno, line in enumerate(lines, start=1):
        if in_header and line.startswith("#"):
            continue
        in_header = False
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3 or not all(parts):
            raise DataError(f"{path}:{lineno}: expected 'lemma<TAB>form<TAB>msd'")
        lemma, form, msd = parts
        pos = msd.split(";")[0]
        key = (lemma, pos)
        if key not in slots:
            slots[key] = {}
            order.append(key)
        slots[key].setdefault(msd, form)
    paradigms = []
    for lemma, pos in order:
        forms = slots[(lemma, pos)]
        if any(" " in f for f in forms.values()):
            continue
        paradigms.append(GoldParadigm(lemma, pos, forms))
    return paradigms


def group_by_pos(gold: list[GoldParadigm]) -> dict[str, list[int]]:
    groups: dict[str, list[int]] = {}
    for i, g in enumerate(gold):
        groups.setdefault(g.pos, []).append(i)
    return groups


def agreement_matrix(
    predictions: list[GeneratedParadigm], gold: list[GoldParadigm], idxs: list[int]
) -> tuple[list[str], list[str], np.ndarray]:
    """Label-by-MSD agreement counts over the given item indices."""
    labels = sorted({lab for i in idxs for lab in predictions[i].entries})
    msds = sorted({m for i in idxs for m in gold[i].slots})
    m = np.zeros((len(labels), len(msds)), dtype=np.int64)
    lab_idx = {lab: r for r, lab in enumerate(labels)}
    msd_idx = {msd: c for c, msd in enumerate(msds)}
    for i in idxs:
        entries = predictions[i].entries
        for msd, form in gold[i].slots.items():
            for lab, generated in entries.items():
                if generated == form:
                    m[lab_idx[lab], msd_idx[msd]] += 1
    return labels, msds, m


def bmacc(
    predictions: list[GeneratedParadigm],
    gold: list[GoldParadigm],
    average: str = "micro",
) -> EvalReport:
    """Best-match accuracy: optimal injective label->MSD mapping per POS.

    predictions[i] is scored against gold[i]. Matching uses maximum-weight
    bipartite assignment; unmatched gold cells score zero. micro pools
    matches over all gold cells; macro averages the per-POS accuracies.
    """
    if len(predictions) != len(gold):
        raise DataError(
            f"prediction/gold length mismatch: {len(predictions)} vs {len(gold)}"
        )
    if not gold:
        raise DataError("empty gold standard")
    if average not in ("micro", "macro"):
        raise ValueError("average must be 'micro' or 'macro'")
    per_pos: dict[str, float] = {}
    mapping: dict[str, dict[str, str]] = {}
    total_matched = 0
    total_cells = 0
    for pos, idxs in sorted(group_by_pos(gold).items()):
        labels, msds, m = agreement_matrix(predictions, gold, idxs)
        cells = sum(len(gold[i].slots) for i in idxs)
        matched = 0
        chosen: dict[str, str] = {}
        if labels and msds:
            rows, cols = linear_sum_assignment(m, maximize=True)
            for r, c in zip(rows, cols):
                if m[r, c] > 0:
                    chosen[labels[r]] = msds[c]
                    matched += int(m[r, c])
        per_pos[pos] = matched / cells if cells else 0.0
        mapping[pos] = chosen
        total_matched += matched
        total_cells += cells
    if average == "micro":
        score = total_matched / total_cells
    else:
        score = sum(per_pos.values()) / len(per_pos)
    return EvalReport(score, per_pos, mapping, total_cells, total_matched, average)


def brute_force_bmacc(
    predictions: list[GeneratedParadigm],
    gold: list[GoldParadigm],
    max_slots: int = 8,
) -> float:
    """Exhaustive-search twin of bmacc (micro), capped at max_slots a side."""
    if len(predictions) != len(gold):
        raise DataError("prediction/gold length mismatch")
    if not gold:
        raise DataError("empty gold standard")
    total_matched = 0
    total_cells = 0
    for _, idxs in sorted(group_by_pos(gold).items()):
        labels, msds, m = agreement_matrix(predictions, gold, idxs)
        if len(labels) > max_slots or len(msds) > max_slots:
            raise DataError(
                f"matrix {len(labels)}x{len(msds)} exceeds brute-force cap {max_slots}"
            )
        cells = sum(len(gold[i].slots) for i in idxs)
        best = 0
        if labels and msds:
            rows = range(len(labels))
            cols = range(len(msds))
            if len(labels) <= len(msds):
                for perm in permutations(cols, len(labels)):
                    best = max(best, sum(m[r, perm[r]] for r in rows))
            else:
                for perm in permutations(rows, len(msds)):
                    best = max(best, sum(m[perm[c], c] for c in cols))
        total_matched += int(best)
        total_cells += cells
    return total_matched / total_cells


def bmf1(predicted: Clustering, gold: list[set[str]]) -> float:
    """Mean F1 of gold clusters under the best injective gold->predicted match."""
    if not gold:
        raise ValueError("bmf1 needs a non-empty gold clustering")
    preds = [set(c.forms) for c in predicted.clusters]
    if not preds:
        return 0.0
    scores = np.zeros((len(gold), len(preds)))
    for gi, g in enumerate(gold):
        for pi, p in enumerate(preds):
            overlap = len(g & p)
            if overlap:
                prec = overlap / len(p)
                rec = overlap / len(g)
                scores[gi, pi] = 2 * prec * rec / (prec + rec)
    rows, cols = linear_sum_assignment(scores, maximize=True)
    return float(scores[rows, cols].sum() / len(gold))


def generate_toy_language(
    suffixes: dict[str, list[str]],
    n_lemmas: int,
    n_sentences: int,
    seed: int = 0,
) -> ToyLanguage:
    """Build a fully regular synthetic language with known paradigms.

    Each POS gets n_lemmas stems (length 4-7 over a consonant alphabet
    disjoint from common suffix characters); every stem+suffix form is
    globally unique. Sentences interleave a high-frequency POS marker word
    before each content word, so contexts identify the POS. Suffix lists
    must be disjoint across POS.
    """
    if not suffixes:
        raise ValueError("need at least one POS")
    if len(suffixes) > len(TOY_MARKERS):
        raise ValueError(f"at most {len(TOY_MARKERS)} POS supported")
    pos_list = sorted(suffixes)
    seen: dict[str, str] = {}
    for pos in pos_list:
        if not suffixes[pos]:
            raise ValueError(f"POS {pos}: empty suffix list")
        if len(set(suffixes[pos])) != len(suffixes[pos]):
            raise ValueError(f"POS {pos}: repeated suffix")
        for sfx in suffixes[pos]:
            if sfx in seen:
                raise ValueError(f"suffix {sfx!r} shared by {seen[sfx]} and {pos}")
            seen[sfx] = pos
    rng = np.random.default_rng(seed)
    alphabet = list(TOY_STEM_ALPHABET)
    stems: dict[str, list[str]] = {pos: [] for pos in pos_list}
    all_forms: set[str] = set()
    attempts = 0
    for pos in pos_list:
        while len(stems[pos]) < n_lemmas:
            attempts += 1
            if attempts > 100 * n_lemmas * len(pos_list):
                raise ValueError("cannot sample non-colliding stems; shrink the language")
            length = int(rng.integers(4, 8))
            stem = "".join(alphabet[int(i)] for i in rng.integers(0, len(alphabet), length))
            forms = [stem + sfx for sfx in suffixes[pos]]
            if any(f in all_forms for f in forms):
                continue
            stems[pos].append(stem)
            all_forms.update(forms)

    paradigms: list[GoldParadigm] = []
    clusters: list[set[str]] = []
    for pos in pos_list:
        for stem in stems[pos]:
            slots = {f"{pos};S{i}": stem + sfx for i, sfx in enumerate(suffixes[pos])}
            paradigms.append(GoldParadigm(stem, pos, slots))
            clusters.append(set(slots.values()))

    markers = {pos: TOY_MARKERS[i] for i, pos in enumerate(pos_list)}
    sentences: list[list[str]] = []
    for _ in range(n_sentences):
        tokens: list[str] = []
        for _ in range(3):
            pos = pos_list[int(rng.integers(0, len(pos_list)))]
            stem = stems[pos][int(rng.integers(0, n_lemmas))]
            sfx = suffixes[pos][int(rng.integers(0, len(suffixes[pos])))]
            tokens.append(markers[pos])
            tokens.append(stem + sfx)
        sentences.append(tokens)
    return ToyLanguage(build_corpus(sentences), paradigms, clusters)


def write_toy_language(toy: ToyLanguage, out_dir: str, header: str | None = None) -> None:
    """Write corpus.txt, gold.tsv, and clusters.tsv for a toy language.

    The corpus file is raw text (headers would become tokens); the gold and
    cluster files carry the comment header.
    """
    import os

    from .cluster import ParadigmCluster, save_clusters

    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "corpus.txt"), "w", encoding="utf-8") as fh:
        for sent in toy.corpus.sentences:
            fh.write(" ".join(sent) + "\n")
    save_unimorph(toy.paradigms, os.path.join(out_dir, "gold.tsv"), header)
    clustering = Clustering(
        [ParadigmCluster(i, frozenset(forms)) for i, forms in enumerate(toy.clusters)]
    )
    save_clusters(clustering, os.path.join(out_dir, "clusters.tsv"), header)


def save_unimorph(paradigms: list[GoldParadigm], path: str, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        for p in paradigms:
            for msd in sorted(p.slots):
                fh.write(f"{p.lemma}\t{p.slots[msd]}\t{msd}\n")


def report_to_dict(report: EvalReport, config_hash: str = "", seed: int | None = None) -> dict:
    out = {
        "average": report.average,
        "bmacc": report.bmacc,
        "per_pos": dict(sorted(report.per_pos.items())),
        "mapping": {pos: dict(sorted(m.items())) for pos, m in sorted(report.mapping.items())},
        "n_gold_forms": report.n_gold_forms,
        "n_matched": report.n_matched,
    }
    if report.bmf1 is not None:
        out["bmf1"] = report.bmf1
    if config_hash:
        out["config"] = config_hash
    if seed is not None:
        out["seed"] = seed
    return out

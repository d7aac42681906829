"""Raw-text ingestion: tokenization, type counts, and context windows.

A corpus is a list of sentences (token lists) plus type counts. Context
samples are (left, target, right) token triples; sentence boundaries and
rare neighbours are replaced by the OOV marker.
"""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass

from .errors import DataError

OOV = "<oov>"


@dataclass(frozen=True)
class ContextSample:
    left: str
    target: str
    right: str


@dataclass
class Corpus:
    sentences: list[list[str]]
    type_counts: dict[str, int]
    n_tokens: int
    n_types: int


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(line: str, lowercase: bool = True) -> list[str]:
    """Split on Unicode whitespace and detach leading/trailing punctuation.

    Interior punctuation stays attached ("don't" is one token). Rejoining
    the output with single spaces and tokenizing again is a fixed point.
    """
    tokens: list[str] = []
    for chunk in line.split():
        if lowercase:
            chunk = chunk.lower()
        lead: list[str] = []
        while chunk and _is_punct(chunk[0]):
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail: list[str] = []
        while chunk and _is_punct(chunk[-1]):
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trail))
    return tokens


def build_corpus(sentences: list[list[str]]) -> Corpus:
    """Assemble a Corpus from pre-tokenized sentences (empty ones dropped)."""
    kept = [s for s in sentences if s]
    counts: Counter[str] = Counter()
    for sent in kept:
        counts.update(sent)
    counts = dict(sorted(counts.items()))
    return Corpus(kept, counts, sum(counts.values()), len(counts))


def load_corpus(path: str, lowercase: bool = True) -> Corpus:
    """Read a one-sentence-per-line UTF-8 file and tokenize it."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read corpus {path}: {exc}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: invalid UTF-8 at byte offset {exc.start}") from None
    return build_corpus([tokenize(line, lowercase) for line in text.splitlines()])


def extract_contexts(corpus: Corpus, target: str, max_contexts: int = 5) -> list[ContextSample]:
    """Collect up to max_contexts distinct context windows for a type.

    Windows are taken in first-occurrence corpus order, deduplicated, and
    truncated. Sentence boundaries appear as the OOV marker. A type absent
    from the corpus yields an empty list.
    """
    if max_contexts < 1:
        raise ValueError("max_contexts must be >= 1")
    seen: set[ContextSample] = set()
    out: list[ContextSample] = []
    for sent in corpus.sentences:
        for i, tok in enumerate(sent):
            if tok != target:
                continue
            left = sent[i - 1] if i > 0 else OOV
            right = sent[i + 1] if i + 1 < len(sent) else OOV
            sample = ContextSample(left, target, right)
            if sample in seen:
                continue
            seen.add(sample)
            out.append(sample)
            if len(out) == max_contexts:
                return out
    return out


def mask_rare(context: ContextSample, corpus: Corpus, alpha: int = 50) -> ContextSample:
    """Replace context words with corpus count < alpha by the OOV marker.

    The target is never masked. Applying the mask twice equals applying it
    once: the marker itself has no corpus count and stays put.
    """
    counts = corpus.type_counts

    def mask(tok: str) -> str:
        return tok if counts.get(tok, 0) >= alpha else OOV

    return ContextSample(mask(context.left), context.target, mask(context.right))

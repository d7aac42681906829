"""Paradigm clusterings: groups of surface forms believed to share a lemma.

Clusterings either come from the built-in string-similarity baseline or are
imported from a tab-separated file produced by an external system.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Corpus
from .errors import DataError


@dataclass(frozen=True)
class ParadigmCluster:
    id: int
    forms: frozenset[str]


@dataclass
class Clustering:
    clusters: list[ParadigmCluster]

    def __len__(self) -> int:
        return len(self.clusters)


def _lcs_len(a: str, b: str) -> int:
    """Length of the longest common substring, via the classic DP table."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    best = 0
    for ca in a:
        cur = [0] * (len(b) + 1)
        for j, cb in enumerate(b, start=1):
            if ca == cb:
                cur[j] = prev[j - 1] + 1
                if cur[j] > best:
                    best = cur[j]
        prev = cur
    return best


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def cluster_baseline(corpus: Corpus, min_lcs_ratio: float = 0.75, min_count: int = 2) -> Clustering:
    """Link types whose common-substring ratio clears the threshold.

    Two types are linked when LCS length / max(len) >= min_lcs_ratio;
    clusters are the connected components over types with corpus count
    >= min_count. Singleton components are kept.
    """
    if not 0.0 < min_lcs_ratio <= 1.0:
        raise ValueError("min_lcs_ratio must be in (0, 1]")
    types = sorted(t for t, c in corpus.type_counts.items() if c >= min_count)
    uf = _UnionFind(len(types))
    for i in range(len(types)):
        for j in range(i + 1, len(types)):
            a, b = types[i], types[j]
            if _lcs_len(a, b) / max(len(a), len(b)) >= min_lcs_ratio:
                uf.union(i, j)
    groups: dict[int, list[str]] = {}
    for i, t in enumerate(types):
        groups.setdefault(uf.find(i), []).append(t)
    components = sorted(groups.values(), key=lambda g: g[0])
    return Clustering([ParadigmCluster(i, frozenset(g)) for i, g in enumerate(components)])


def remove_subset_clusters(clustering: Clustering) -> Clustering:
    """Drop clusters whose form set is a proper subset of another cluster's.

    Clusters with identical form sets collapse to the one with the lower id.
    Idempotent; ids of survivors are preserved.
    """
    by_forms: dict[frozenset[str], ParadigmCluster] = {}
    for c in sorted(clustering.clusters, key=lambda c: c.id):
        by_forms.setdefault(c.forms, c)
    distinct = sorted(by_forms.values(), key=lambda c: c.id)
    kept = [
        c
        for c in distinct
        if not any(c.forms < other.forms for other in distinct if other is not c)
    ]
    return Clustering(kept)


def drop_singletons(clustering: Clustering) -> Clustering:
    """Keep only clusters with at least two forms; ids are preserved."""
    return Clustering([c for c in clustering.clusters if len(c.forms) >= 2])


def load_clusters(path: str) -> Clustering:
    """Read one cluster per line, forms tab-separated; ids follow line order.

    Leading comment lines (starting with '#') are skipped. Empty lines and
    lines with empty or repeated forms are rejected with their line number.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read clusters {path}: {exc}") from None
    clusters: list[ParadigmCluster] = []
    in_header = True
    for lineno, line in enumerate(lines, start=1):
        if in_header and line.startswith("#"):
            continue
        in_header = False
        forms = line.split("\t")
        if forms == [""]:
            raise DataError(f"{path}:{lineno}: empty cluster line")
        if any(f == "" for f in forms):
            raise DataError(f"{path}:{lineno}: empty form field")
        if len(set(forms)) != len(forms):
            raise DataError(f"{path}:{lineno}: duplicate form within cluster")
        clusters.append(ParadigmCluster(len(clusters), frozenset(forms)))
    return Clustering(clusters)


def save_clusters(clustering: Clustering, path: str, header: str | None = None) -> None:
    """Write clusters in id order, forms sorted and tab-separated."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        for c in sorted(clustering.clusters, key=lambda c: c.id):
            fh.write("\t".join(sorted(c.forms)) + "\n")

"""Slot alignment: group abstract forms of one POS into paradigm slots.

Two abstract forms that co-occur in the same paradigms (high Jaccard) are
almost never the same slot, whatever their embeddings say, so similarity is
cosine scaled by (1 - Jaccard). Agglomerative clustering with a distance
threshold turns the similarities into slot groups; slot indices within a
POS are assigned by descending membership.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .abstract import AbstractForm
from .cluster import Clustering
from .embed import EmbeddingTable, abstract_form_vector, cosine
from .errors import DataError, InvariantError, MissingEmbeddingError
from .posem import PosAssignment

LINKAGES = ("single", "complete", "average")


@dataclass(frozen=True, order=True)
class SlotID:
    pos: int
    index: int

    def __str__(self) -> str:
        return f"{self.pos}:{self.index}"


def parse_slot(text: str) -> SlotID:
    parts = text.split(":")
    if len(parts) != 2:
        raise DataError(f"bad slot id {text!r}")
    try:
        return SlotID(int(parts[0]), int(parts[1]))
    except ValueError:
        raise DataError(f"bad slot id {text!r}") from None


@dataclass
class SlotAssignment:
    pattern_slots: dict[str, SlotID]
    form_slots: dict[tuple[int, str], SlotID]
    pos_slots: dict[int, list[SlotID]]


@dataclass(frozen=True)
class TrainingTriple:
    source_form: str
    source_slot: SlotID
    target_slot: SlotID
    target_form: str


def jaccard(a: AbstractForm, b: AbstractForm) -> float:
    """Jaccard overlap of the paradigm sets containing each pattern."""
    ca = {cid for cid, _ in a.members}
    cb = {cid for cid, _ in b.members}
    if not ca and not cb:
        return 0.0
    return len(ca & cb) / len(ca | cb)


def similarity(a: AbstractForm, b: AbstractForm, table: EmbeddingTable) -> float:
    """Cosine of the form vectors scaled by (1 - Jaccard); range [-1, 1]."""
    va = abstract_form_vector(a, table).vector
    vb = abstract_form_vector(b, table).vector
    return cosine(va, vb) * (1.0 - jaccard(a, b))


def _agglomerate(
    patterns: list[str], dist: np.ndarray, threshold: float, linkage: str
) -> list[list[int]]:
    """Merge-until-threshold clustering over a precomputed distance matrix.

    Among equal-distance pairs the one whose smallest member pattern is
    lexicographically least merges first (then the other side's smallest
    pattern). Merging stops once the minimum inter-cluster distance
    exceeds the threshold.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}")
    members: dict[int, list[int]] = {i: [i] for i in range(len(patterns))}
    minpat: dict[int, str] = {i: patterns[i] for i in range(len(patterns))}
    cdist: dict[tuple[int, int], float] = {}
    for i in range(len(patterns)):
        for j in range(i + 1, len(patterns)):
            cdist[(i, j)] = float(dist[i, j])

    def pair_key(pair: tuple[int, int]) -> tuple[float, str, str]:
        lo, hi = sorted((minpat[pair[0]], minpat[pair[1]]))
        return (cdist[pair], lo, hi)

    while len(members) > 1:
        best = min(cdist, key=pair_key)
        if cdist[best] > threshold:
            break
        i, j = best
        ni, nj = len(members[i]), len(members[j])
        for other in list(members):
            if other in (i, j):
                continue
            a = cdist.pop(tuple(sorted((i, other))))
            b = cdist.pop(tuple(sorted((j, other))))
            if linkage == "single":
                merged = min(a, b)
            elif linkage == "complete":
                merged = max(a, b)
            else:
                merged = (ni * a + nj * b) / (ni + nj)
            cdist[tuple(sorted((i, other)))] = merged
        del cdist[best]
        members[i] = members[i] + members[j]
        minpat[i] = min(minpat[i], minpat[j])
        del members[j], minpat[j]
    return [sorted(group) for _, group in sorted(members.items())]


def cluster_slots(
    forms: list[AbstractForm],
    table: EmbeddingTable,
    distance_threshold: float = 0.15,
    pos: int = 0,
    linkage: str = "average",
) -> SlotAssignment:
    """Cluster one POS's abstract forms into slots.

    Distance is 1 - similarity. Forms whose vector cannot be computed get
    singleton slots (with a warning) rather than aborting the POS. Slot
    indices run in descending order of total membership, ties broken by the
    group's smallest pattern.
    """
    ordered = sorted(forms, key=lambda f: f.pattern)
    vecs: dict[str, np.ndarray] = {}
    missing: list[AbstractForm] = []
    for f in ordered:
        try:
            vecs[f.pattern] = abstract_form_vector(f, table).vector
        except MissingEmbeddingError:
            missing.append(f)
    have = [f for f in ordered if f.pattern in vecs]
    groups: list[list[AbstractForm]] = []
    if have:
        n = len(have)
        dist = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                sim = cosine(vecs[have[i].pattern], vecs[have[j].pattern]) * (
                    1.0 - jaccard(have[i], have[j])
                )
                dist[i, j] = dist[j, i] = 1.0 - sim
        for idxs in _agglomerate([f.pattern for f in have], dist, distance_threshold, linkage):
            groups.append([have[i] for i in idxs])
    if missing:
        warnings.warn(f"{len(missing)} abstract form(s) without vectors got singleton slots")
        groups.extend([f] for f in missing)

    groups.sort(key=lambda g: (-sum(len(f.members) for f in g), min(f.pattern for f in g)))
    pattern_slots: dict[str, SlotID] = {}
    form_slots: dict[tuple[int, str], SlotID] = {}
    slots: list[SlotID] = []
    for index, group in enumerate(groups):
        sid = SlotID(pos, index)
        slots.append(sid)
        for f in sorted(group, key=lambda f: f.pattern):
            pattern_slots[f.pattern] = sid
            for member in sorted(f.members):
                form_slots[member] = sid
    return SlotAssignment(pattern_slots, form_slots, {pos: slots} if slots else {})


def split_forms_by_tag(
    forms: list[AbstractForm], assignment: PosAssignment
) -> dict[int, list[AbstractForm]]:
    """Route each pattern to one POS tag and restrict its members to it.

    A pattern can occur in clusters with different tags; it goes to the tag
    holding most of its members (ties to the smaller tag), and members in
    other tags' clusters are dropped so every slot stays single-POS.
    """
    out: dict[int, list[AbstractForm]] = {}
    for form in sorted(forms, key=lambda f: f.pattern):
        by_tag: dict[int, set[tuple[int, str]]] = {}
        for cid, surface in form.members:
            tag = assignment.tag_of.get(cid)
            if tag is not None:
                by_tag.setdefault(tag, set()).add((cid, surface))
        if not by_tag:
            continue
        tag = max(sorted(by_tag), key=lambda k: (len(by_tag[k]), -k))
        out.setdefault(tag, []).append(AbstractForm(form.pattern, by_tag[tag]))
    return out


def build_slot_assignment(
    forms: list[AbstractForm],
    assignment: PosAssignment,
    table: EmbeddingTable,
    distance_threshold: float = 0.15,
    linkage: str = "average",
) -> SlotAssignment:
    """Cluster every POS's forms and merge the per-POS fragments."""
    merged = SlotAssignment({}, {}, {})
    for tag, tag_forms in sorted(split_forms_by_tag(forms, assignment).items()):
        frag = cluster_slots(tag_forms, table, distance_threshold, tag, linkage)
        for pattern, sid in frag.pattern_slots.items():
            if pattern in merged.pattern_slots:
                raise InvariantError(f"pattern {pattern!r} assigned to two slots")
            merged.pattern_slots[pattern] = sid
        merged.form_slots.update(frag.form_slots)
        merged.pos_slots.update(frag.pos_slots)
    return merged


def emit_triples(clustering: Clustering, assignment: SlotAssignment) -> list[TrainingTriple]:
    """Emit (form, slot, slot, form) pairs within each cluster.

    Ordered pairs of distinct slot-assigned forms, skipping pairs that
    landed in the same slot; order is cluster id, then lexicographic by
    source and target form.
    """
    triples: list[TrainingTriple] = []
    for cluster in sorted(clustering.clusters, key=lambda c: c.id):
        assigned = sorted(
            f for f in cluster.forms if (cluster.id, f) in assignment.form_slots
        )
        for src in assigned:
            for tgt in assigned:
                if src == tgt:
                    continue
                s_slot = assignment.form_slots[(cluster.id, src)]
                t_slot = assignment.form_slots[(cluster.id, tgt)]
                if s_slot == t_slot:
                    continue
                triples.append(TrainingTriple(src, s_slot, t_slot, tgt))
    return triples


def save_triples(triples: list[TrainingTriple], path: str, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        for t in triples:
            fh.write(f"{t.source_form}\t{t.source_slot}\t{t.target_slot}\t{t.target_form}\n")


def load_triples(path: str) -> list[TrainingTriple]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read triples {path}: {exc}") from None
    triples: list[TrainingTriple] = []
    in_header = True
    for lineno, line in enumerate(lines, start=1):
        if in_header and line.startswith("#"):
            continue
        in_header = False
        parts = line.split("\t")
        if len(parts) != 4:
            raise DataError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
        triples.append(
            TrainingTriple(parts[0], parse_slot(parts[1]), parse_slot(parts[2]), parts[3])
        )
    return triples


def save_slot_assignment(assignment: SlotAssignment, prefix: str, header: str | None = None) -> None:
    """Write pattern->slot and (cluster, form)->slot maps as two TSV files."""
    with open(f"{prefix}_patterns.tsv", "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        for pattern in sorted(assignment.pattern_slots):
            fh.write(f"{pattern}\t{assignment.pattern_slots[pattern]}\n")
    with open(f"{prefix}_forms.tsv", "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        for cid, form in sorted(assignment.form_slots):
            fh.write(f"{cid}\t{form}\t{assignment.form_slots[(cid, form)]}\n")


def load_slot_assignment(prefix: str) -> SlotAssignment:
    pattern_slots: dict[str, SlotID] = {}
    form_slots: dict[tuple[int, str], SlotID] = {}
    path = f"{prefix}_patterns.tsv"
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read slot map {path}: {exc}") from None
    in_header = True
    for lineno, line in enumerate(lines, start=1):
        if in_header and line.startswith("#"):
            continue
        in_header = False
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(f"{path}:{lineno}: expected 2 fields")
        pattern_slots[parts[0]] = parse_slot(parts[1])
    path = f"{prefix}_forms.tsv"
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read slot map {path}: {exc}") from None
    in_header = True
    for lineno, line in enumerate(lines, start=1):
        if in_header and line.startswith("#"):
            continue
        in_header = False
        parts = line.split("\t")
        if len(parts) != 3:
            raise DataError(f"{path}:{lineno}: expected 3 fields")
        try:
            cid = int(parts[0])
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-integer cluster id") from None
        form_slots[(cid, parts[1])] = parse_slot(parts[2])
    pos_slots: dict[int, list[SlotID]] = {}
    for sid in sorted(set(pattern_slots.values())):
        pos_slots.setdefault(sid.pos, []).append(sid)
    return SlotAssignment(pattern_slots, form_slots, pos_slots)

"""Edit trees and inflection generation.

An edit tree records how to rewrite one string into another: either a leaf
that replaces a literal source with a literal target, or a node that keeps
the longest common substring as a pass-through variable and recurses on the
flanks. Trees built from form pairs are ranked and applied to new words to
generate inflections, either unconditionally (top-N baseline) or keyed by
(source slot, target slot) pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .abstract import longest_common_substring
from .align import SlotID, TrainingTriple
from .cluster import Clustering
from .errors import DataError


@dataclass(frozen=True)
class Leaf:
    source: str
    target: str


@dataclass(frozen=True)
class Node:
    # Offsets delimit the pass-through variable in the *input* form:
    # pre_len characters go to the prefix subtree, suf_len to the suffix
    # subtree, and whatever lies between is copied through unchanged.
    pre_len: int
    suf_len: int
    prefix: "EditTree"
    suffix: "EditTree"


EditTree = Leaf | Node


@dataclass
class TreeStats:
    count: int
    mlen: int
    mstr: str


@dataclass
class GeneratedParadigm:
    input_form: str
    input_label: str
    entries: dict[str, str]


def build_edit_tree(source: str, target: str) -> EditTree:
    """Recursively decompose a string pair around its longest common substring."""
    common = longest_common_substring({source, target}) if source and target else ""
    if not common:
        return Leaf(source, target)
    i = source.index(common)
    j = target.index(common)
    return Node(
        i,
        len(source) - i - len(common),
        build_edit_tree(source[:i], target[:j]),
        build_edit_tree(source[i + len(common) :], target[j + len(common) :]),
    )


def mlen(tree: EditTree) -> int:
    """Total length of literal source material the tree must match."""
    if isinstance(tree, Leaf):
        return len(tree.source)
    return mlen(tree.prefix) + mlen(tree.suffix)


def mstr(tree: EditTree) -> str:
    """Concatenated leaf targets, left to right; the tree's slot label."""
    if isinstance(tree, Leaf):
        return tree.target
    return mstr(tree.prefix) + mstr(tree.suffix)


def apply_edit_tree(tree: EditTree, form: str) -> str | None:
    """Apply a tree to a form, or None if it does not fit.

    A leaf fits only its exact source. A node fits if the form is long
    enough to leave a non-empty variable between its recorded flank
    offsets and both subtrees fit their flanks. Splitting at recorded
    offsets rather than searching makes application a function of the
    tree alone, so apply(build(f, g), f) == g always holds.
    """
    if isinstance(tree, Leaf):
        return tree.target if form == tree.source else None
    if len(form) <= tree.pre_len + tree.suf_len:
        return None
    cut = len(form) - tree.suf_len
    left = apply_edit_tree(tree.prefix, form[: tree.pre_len])
    if left is None:
        return None
    right = apply_edit_tree(tree.suffix, form[cut:])
    if right is None:
        return None
    return left + form[tree.pre_len : cut] + right


def tree_key(tree: EditTree) -> str:
    """Canonical serialization; used as the final ranking tie-break."""
    if isinstance(tree, Leaf):
        return f"L({tree.source}>{tree.target})"
    return (
        f"N{tree.pre_len},{tree.suf_len}"
        f"({tree_key(tree.prefix)},{tree_key(tree.suffix)})"
    )


def collect_trees(clustering: Clustering) -> dict[EditTree, TreeStats]:
    """Build trees for every ordered pair of distinct forms within a cluster."""
    stats: dict[EditTree, TreeStats] = {}
    for cluster in sorted(clustering.clusters, key=lambda c: c.id):
        forms = sorted(cluster.forms)
        for src in forms:
            for tgt in forms:
                if src == tgt:
                    continue
                tree = build_edit_tree(src, tgt)
                entry = stats.get(tree)
                if entry is None:
                    stats[tree] = TreeStats(1, mlen(tree), mstr(tree))
                else:
                    entry.count += 1
    return stats


def rank_trees(stats: dict[EditTree, TreeStats]) -> list[EditTree]:
    """Order trees by match length desc, count desc, then label; total order."""
    return sorted(
        stats,
        key=lambda t: (-stats[t].mlen, -stats[t].count, stats[t].mstr, tree_key(t)),
    )


def choose_n(clustering: Clustering) -> int:
    """Paradigm size to generate: 95th percentile (nearest rank) of
    non-singleton cluster sizes."""
    sizes = sorted(len(c.forms) for c in clustering.clusters if len(c.forms) >= 2)
    if not sizes:
        raise DataError("cannot choose a paradigm size: no cluster has two forms")
    rank = math.ceil(0.95 * len(sizes))
    return sizes[rank - 1]


def back_label(
    form: str, generated: dict[str, str], stats: dict[EditTree, TreeStats]
) -> str:
    """Label the input form by reversing a known tree from a generated form.

    Among known trees mapping some generated form back onto the input, the
    one with the largest (match length, count) wins. If none fits, a fresh
    tree is built from the top-ranked generated form instead.
    """
    candidates: list[tuple[int, int, str, str]] = []
    for other in generated.values():
        if other == form:
            continue
        for tree, st in stats.items():
            if apply_edit_tree(tree, other) == form:
                candidates.append((st.mlen, st.count, st.mstr, tree_key(tree)))
    if candidates:
        best = max(candidates, key=lambda c: (c[0], c[1], c[2], c[3]))
        return best[2]
    for other in generated.values():
        if other != form:
            return mstr(build_edit_tree(other, form))
    return ""


def baseline_generate(
    form: str,
    ranked: list[EditTree],
    n: int,
    stats: dict[EditTree, TreeStats],
) -> GeneratedParadigm:
    """Slot-agnostic generation: apply the top n applicable ranked trees.

    Entries are labeled by each tree's rewrite string; label collisions keep
    the higher-ranked tree's output. The input form itself is labeled by
    back_label and overrides any colliding entry. With no applicable trees
    the paradigm holds only the input form under an empty label.
    """
    entries: dict[str, str] = {}
    used = 0
    for tree in ranked:
        if used == n:
            break
        result = apply_edit_tree(tree, form)
        if result is None:
            continue
        entries.setdefault(stats[tree].mstr, result)
        used += 1
    label = back_label(form, entries, stats) if entries else ""
    entries[label] = form
    return GeneratedParadigm(form, label, entries)


def train_aligned_inflector(
    triples: list[TrainingTriple],
) -> dict[tuple[SlotID, SlotID], list[EditTree]]:
    """Rank edit trees separately per (source slot, target slot) pair."""
    per_pair: dict[tuple[SlotID, SlotID], dict[EditTree, TreeStats]] = {}
    for t in triples:
        tree = build_edit_tree(t.source_form, t.target_form)
        stats = per_pair.setdefault((t.source_slot, t.target_slot), {})
        entry = stats.get(tree)
        if entry is None:
            stats[tree] = TreeStats(1, mlen(tree), mstr(tree))
        else:
            entry.count += 1
    return {pair: rank_trees(stats) for pair, stats in sorted(per_pair.items())}


def aligned_inflect(
    model: dict[tuple[SlotID, SlotID], list[EditTree]],
    form: str,
    source: SlotID,
    target: SlotID,
) -> str | None:
    """Apply the highest-ranked applicable tree stored under (source, target)."""
    for tree in model.get((source, target), []):
        result = apply_edit_tree(tree, form)
        if result is not None:
            return result
    return None


def save_generated(
    paradigms: list[GeneratedParadigm], path: str, header: str | None = None
) -> None:
    """Write blank-line-separated blocks of '<input> <label> <form>' rows.

    The first row of each block is the input form under its own label;
    remaining entries follow in insertion order.
    """
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        for p in paradigms:
            fh.write(f"{p.input_form}\t{p.input_label}\t{p.input_form}\n")
            for label, form in p.entries.items():
                if label == p.input_label:
                    continue
                fh.write(f"{p.input_form}\t{label}\t{form}\n")
            fh.write("\n")


def load_generated(path: str) -> list[GeneratedParadigm]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read paradigms {path}: {exc}") from None
    paradigms: list[GeneratedParadigm] = []
    block: list[tuple[str, str, str]] = []
    in_header = True

    def flush() -> None:
        if not block:
            return
        input_form, input_label, first_form = block[0]
        if first_form != input_form:
            raise DataError(f"{path}: block for {input_form!r} must start with the input row")
        entries: dict[str, str] = {input_label: input_form}
        for form, label, generated in block[1:]:
            if form != input_form:
                raise DataError(f"{path}: mixed input forms within a block")
            entries.setdefault(label, generated)
        paradigms.append(GeneratedParadigm(input_form, input_label, entries))
        block.clear()

    for lineno, line in enumerate(lines, start=1):
        if in_header and line.startswith("#"):
            continue
        in_header = False
        if line == "":
            flush()
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
        block.append((parts[0], parts[1], parts[2]))
    flush()
    return paradigms

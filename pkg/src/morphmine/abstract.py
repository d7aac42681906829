"""Abstract paradigms: clusters reduced to a shared stem plus form patterns.

Each cluster member is rewritten as a pattern over the stem variable X0,
e.g. walking -> X0+ing with stem walk. Patterns are plain strings joined
with '+'; a prefixed and suffixed form renders as ge+X0+t.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cluster import ParadigmCluster

STEM_VAR = "X0"


@dataclass
class AbstractParadigm:
    cluster_id: int
    stem: str
    form_map: dict[str, str]

    @property
    def patterns(self) -> set[str]:
        return set(self.form_map.values())


@dataclass
class AbstractForm:
    pattern: str
    members: set[tuple[int, str]]

    @property
    def count(self) -> int:
        """Number of distinct paradigms the pattern occurs in."""
        return len({cid for cid, _ in self.members})


def longest_common_substring(forms: set[str] | frozenset[str] | list[str]) -> str:
    """Longest substring shared by every form in a non-empty collection.

    Ties go to the candidate with the leftmost occurrence in the
    lexicographically smallest form, then to the lexicographically smaller
    substring. Uses binary search over the candidate length; a length-L
    common substring implies one of every shorter length, so the predicate
    is monotone.
    """
    items = sorted(set(forms))
    if not items:
        raise ValueError("need at least one form")
    ref = min(items, key=len)
    others = [f for f in items if f != ref]
    lo, hi = 0, len(ref)
    best: set[str] = set()
    while lo < hi:
        mid = (lo + hi + 1) // 2
        cands = {ref[i : i + mid] for i in range(len(ref) - mid + 1)}
        common = {c for c in cands if all(c in o for o in others)}
        if common:
            lo = mid
            best = common
        else:
            hi = mid - 1
    if lo == 0:
        return ""
    smallest = items[0]
    return min(best, key=lambda c: (smallest.index(c), c))


def make_pattern(prefix: str, suffix: str) -> str:
    return "+".join(part for part in (prefix, STEM_VAR, suffix) if part)


def substitute(pattern: str, stem: str) -> str:
    """Replace the stem variable in a pattern with the stem string.

    Assumes patterns produced by make_pattern; forms that themselves contain
    the literal variable marker next to '+' separators are not supported.
    """
    if pattern == STEM_VAR:
        return stem
    if pattern.startswith(STEM_VAR + "+"):
        return stem + pattern[len(STEM_VAR) + 1 :]
    if pattern.endswith("+" + STEM_VAR):
        return pattern[: -len(STEM_VAR) - 1] + stem
    marker = "+" + STEM_VAR + "+"
    idx = pattern.find(marker)
    if idx < 0:
        raise ValueError(f"pattern without stem variable: {pattern!r}")
    return pattern[:idx] + stem + pattern[idx + len(marker) :]


def abstractify(cluster: ParadigmCluster, min_stem_len: int = 2) -> AbstractParadigm | None:
    """Reduce a cluster to an abstract paradigm, or None if the stem is short.

    The stem is the longest common substring of the member forms; each form
    becomes prefix+X0+suffix around its leftmost stem occurrence.
    """
    if len(cluster.forms) < 2:
        raise ValueError("abstractify needs a cluster with at least two forms")
    stem = longest_common_substring(cluster.forms)
    if len(stem) < min_stem_len:
        return None
    form_map: dict[str, str] = {}
    for form in sorted(cluster.forms):
        i = form.index(stem)
        form_map[form] = make_pattern(form[:i], form[i + len(stem) :])
    return AbstractParadigm(cluster.id, stem, form_map)


def build_abstract_forms(paradigms: list[AbstractParadigm]) -> list[AbstractForm]:
    """Aggregate patterns across paradigms into AbstractForms, sorted by pattern."""
    members: dict[str, set[tuple[int, str]]] = {}
    for p in paradigms:
        for form, pattern in p.form_map.items():
            members.setdefault(pattern, set()).add((p.cluster_id, form))
    return [AbstractForm(pat, members[pat]) for pat in sorted(members)]


def filter_rare(
    forms: list[AbstractForm],
    beta: int,
    paradigms: list[AbstractParadigm] | None = None,
    token_counts: dict[str, int] | None = None,
) -> list[AbstractForm]:
    """Keep abstract forms whose support reaches beta; prune the rest.

    Support is the paradigm count by default; pass token_counts to measure
    it as the total corpus token count of member types instead. When
    paradigms are given, dropped patterns are also removed from their
    form maps in place, so downstream stages never see them.
    """

    def support(form: AbstractForm) -> int:
        if token_counts is None:
            return form.count
        return sum(token_counts.get(f, 0) for _, f in form.members)

    kept = [f for f in forms if support(f) >= beta]
    if paradigms is not None:
        retained = {f.pattern for f in kept}
        for p in paradigms:
            p.form_map = {w: pat for w, pat in p.form_map.items() if pat in retained}
    return kept


def save_abstract(paradigms: list[AbstractParadigm], path: str, header: str | None = None) -> None:
    """Write one line per paradigm: cluster_id, stem, comma-joined patterns."""
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header)
        for p in sorted(paradigms, key=lambda p: p.cluster_id):
            pats = ",".join(sorted(p.patterns))
            fh.write(f"{p.cluster_id}\t{p.stem}\t{pats}\n")

"""End-to-end pipeline: staged execution with cached artifacts on disk.

Stages run in a fixed order (cluster, align, predict, inflect, evaluate);
each reads its inputs from the output directory and writes its artifacts
there, so stage-wise runs compose to the same bytes as a monolithic run.
Every text artifact starts with a comment header recording the config hash
and seed. All stages are deterministic given the config.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, fields
from typing import get_type_hints

import numpy as np

from . import abstract, align, cluster, embed, evaluate, inflect, posem, report, slotpred
from .corpus import OOV, ContextSample, Corpus, extract_contexts, load_corpus, mask_rare
from .errors import ConfigError, DataError, MorphmineError, StageError

log = logging.getLogger("morphmine")

STAGES = ("cluster", "align", "predict", "inflect", "evaluate")


@dataclass
class PipelineConfig:
    corpus_path: str = ""
    cluster_source: str = "baseline"  # 'baseline' or a cluster file path
    embedding_source: str = "train"  # 'train' or an embedding file path
    inflector: str = "aligned"  # 'aligned' or 'baseline'
    gold_path: str = ""
    test_path: str = ""
    out_dir: str = "out"
    seed: int = 0
    lowercase: bool = True
    alpha: int = 50
    beta: int = 50
    beta_unit: str = "paradigms"  # or 'tokens'
    n_tags: int = 3
    distance_threshold: float = 0.15
    linkage: str = "average"
    max_contexts: int = 5
    min_lcs_ratio: float = 0.75
    min_count: int = 2
    min_stem_len: int = 2
    em_max_iters: int = 100
    em_tol: float = 1e-6
    em_restarts: int = 1
    embed_dim: int = 100
    embed_window: int = 5
    embed_epochs: int = 5
    embed_negatives: int = 5
    embed_lr: float = 0.05
    embed_min_n: int = 3
    embed_max_n: int = 6
    predictor_epochs: int = 10
    predictor_lr: float = 0.5
    bmacc_average: str = "micro"
    figures: bool = True

    def validate(self) -> None:
        if self.alpha < 0 or self.beta < 0:
            raise ConfigError("alpha and beta must be >= 0")
        if not 0.0 <= self.distance_threshold <= 2.0:
            raise ConfigError("distance_threshold must lie in [0, 2]")
        if self.max_contexts < 1:
            raise ConfigError("max_contexts must be >= 1")
        if self.n_tags < 1:
            raise ConfigError("n_tags must be >= 1")
        if not 0.0 < self.min_lcs_ratio <= 1.0:
            raise ConfigError("min_lcs_ratio must lie in (0, 1]")
        if self.inflector not in ("aligned", "baseline"):
            raise ConfigError("inflector must be 'aligned' or 'baseline'")
        if self.beta_unit not in ("paradigms", "tokens"):
            raise ConfigError("beta_unit must be 'paradigms' or 'tokens'")
        if self.linkage not in align.LINKAGES:
            raise ConfigError(f"linkage must be one of {align.LINKAGES}")
        if self.bmacc_average not in ("micro", "macro"):
            raise ConfigError("bmacc_average must be 'micro' or 'macro'")
        if self.em_restarts < 1 or self.em_max_iters < 0:
            raise ConfigError("em_restarts must be >= 1 and em_max_iters >= 0")
        if not (0 < self.embed_min_n <= self.embed_max_n):
            raise ConfigError("need 0 < embed_min_n <= embed_max_n")
        if self.embed_dim < 1 or self.embed_window < 1 or self.embed_negatives < 1:
            raise ConfigError("embedding dim, window, and negatives must be >= 1")

    def config_hash(self) -> str:
        """Hash of everything that shapes artifact content (out_dir excluded)."""
        pairs = [
            f"{f.name}={getattr(self, f.name)}"
            for f in fields(self)
            if f.name != "out_dir"
        ]
        return hashlib.sha256("\n".join(pairs).encode("utf-8")).hexdigest()[:12]

    def header(self) -> str:
        return f"# config={self.config_hash()} seed={self.seed}\n"

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)


def _coerce(name: str, kind: type, raw: str):
    raw = raw.strip()
    if kind is bool:
        low = raw.lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{name}: expected {kind.__name__}, got {raw!r}") from None


def load_config(path: str | None = None, overrides: dict | None = None) -> PipelineConfig:
    """Build a config from an optional key=value file plus overrides.

    Override values win over file values; both win over defaults. String
    overrides are coerced like file values, native values pass through.
    """
    cfg = PipelineConfig()
    hints = get_type_hints(PipelineConfig)
    valid = {f.name for f in fields(PipelineConfig)}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        for lineno, line in enumerate(lines, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, _, value = stripped.partition("=")
            key = key.strip()
            if key not in valid:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            setattr(cfg, key, _coerce(key, hints[key], value))
    for key, value in (overrides or {}).items():
        if key not in valid:
            raise ConfigError(f"unknown config key {key!r}")
        if value is None:
            continue
        if isinstance(value, str):
            value = _coerce(key, hints[key], value)
        setattr(cfg, key, value)
    cfg.validate()
    return cfg


def _load_corpus(cfg: PipelineConfig) -> Corpus:
    if not cfg.corpus_path:
        raise StageError("corpus", DataError("no corpus path configured"))
    try:
        return load_corpus(cfg.corpus_path, cfg.lowercase)
    except MorphmineError as exc:
        raise StageError("corpus", exc) from exc


def save_pos_assignment(assignment: posem.PosAssignment, path: str, header: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header)
        for cid in sorted(assignment.tag_of):
            fh.write(f"{cid}\t{assignment.tag_of[cid]}\n")


def load_test_items(path: str) -> list[ContextSample]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read test items {path}: {exc}") from None
    items: list[ContextSample] = []
    in_header = True
    for lineno, line in enumerate(lines, start=1):
        if in_header and line.startswith("#"):
            continue
        in_header = False
        parts = line.split("\t")
        if len(parts) != 3:
            raise DataError(f"{path}:{lineno}: expected '<left>\\t<target>\\t<right>'")
        items.append(ContextSample(parts[0], parts[1], parts[2]))
    return items


def save_test_items(items: list[ContextSample], path: str, header: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header)
        for item in items:
            fh.write(f"{item.left}\t{item.target}\t{item.right}\n")


def derive_eval_items(
    gold: list[evaluate.GoldParadigm], corpus: Corpus, cfg: PipelineConfig
) -> list[ContextSample]:
    """One seeded test item per gold paradigm: a surface form in context.

    Forms absent from the corpus get OOV context markers. Item order follows
    gold order, which is what pairs predictions with paradigms downstream.
    """
    rng = np.random.default_rng([cfg.seed, 11])
    items: list[ContextSample] = []
    for paradigm in gold:
        msds = sorted(paradigm.slots)
        form = paradigm.slots[msds[int(rng.integers(0, len(msds)))]]
        contexts = extract_contexts(corpus, form, cfg.max_contexts)
        if contexts:
            items.append(contexts[int(rng.integers(0, len(contexts)))])
        else:
            items.append(ContextSample(OOV, form, OOV))
    return items


def stage_cluster(cfg: PipelineConfig) -> None:
    corpus = _load_corpus(cfg)
    if cfg.cluster_source == "baseline":
        clustering = cluster.cluster_baseline(corpus, cfg.min_lcs_ratio, cfg.min_count)
        clustering = cluster.remove_subset_clusters(clustering)
    else:
        clustering = cluster.load_clusters(cfg.cluster_source)
    cluster.save_clusters(clustering, cfg.path("clusters.tsv"), cfg.header())
    log.info("cluster: %d clusters", len(clustering))


def stage_align(cfg: PipelineConfig) -> None:
    corpus = _load_corpus(cfg)
    clustering = cluster.load_clusters(cfg.path("clusters.tsv"))
    multi = cluster.drop_singletons(clustering)
    paradigms = []
    for c in sorted(multi.clusters, key=lambda c: c.id):
        p = abstract.abstractify(c, cfg.min_stem_len)
        if p is not None:
            paradigms.append(p)
    if not paradigms:
        raise DataError("no cluster could be abstracted; nothing to align")
    forms = abstract.build_abstract_forms(paradigms)
    token_counts = corpus.type_counts if cfg.beta_unit == "tokens" else None
    kept = abstract.filter_rare(forms, cfg.beta, paradigms, token_counts)
    abstract.save_abstract(paradigms, cfg.path("abstract.tsv"), cfg.header())
    if not kept:
        raise DataError(
            f"no abstract form reaches beta={cfg.beta}; lower beta or grow the corpus"
        )

    best_model = None
    for restart in range(cfg.em_restarts):
        model = posem.em_fit(
            paradigms,
            cfg.n_tags,
            cfg.em_max_iters,
            cfg.em_tol,
            seed=cfg.seed + 1000 * restart,
        )
        if best_model is None or model.loglik_trace[-1] > best_model.loglik_trace[-1]:
            best_model = model
    posem.save_pos_model(best_model, cfg.path("pos_model.txt"), cfg.header())
    pos_assignment = posem.assign_pos(best_model, paradigms)
    save_pos_assignment(pos_assignment, cfg.path("pos_assignment.tsv"), cfg.header())

    if cfg.embedding_source == "train":
        table = embed.train_embeddings(
            corpus,
            dim=cfg.embed_dim,
            window=cfg.embed_window,
            epochs=cfg.embed_epochs,
            seed=cfg.seed,
            negatives=cfg.embed_negatives,
            lr=cfg.embed_lr,
            min_n=cfg.embed_min_n,
            max_n=cfg.embed_max_n,
        )
        embed.save_embeddings(table, cfg.path("embeddings.vec"), cfg.header())
    else:
        table = embed.load_embeddings(cfg.embedding_source)

    slot_assignment = align.build_slot_assignment(
        kept, pos_assignment, table, cfg.distance_threshold, cfg.linkage
    )
    align.save_slot_assignment(slot_assignment, cfg.path("slots"), cfg.header())
    triples = align.emit_triples(clustering, slot_assignment)
    align.save_triples(triples, cfg.path("triples.tsv"), cfg.header())
    log.info(
        "align: %d paradigms, %d retained patterns, %d slots, %d triples",
        len(paradigms),
        len(kept),
        len(set(slot_assignment.pattern_slots.values())),
        len(triples),
    )


def stage_predict(cfg: PipelineConfig) -> None:
    corpus = _load_corpus(cfg)
    assignment = align.load_slot_assignment(cfg.path("slots"))
    examples = slotpred.build_training_data(corpus, assignment, cfg.max_contexts, cfg.alpha)
    if not examples:
        raise DataError("no slot-assigned form occurs in the corpus; cannot train predictor")
    predictor = slotpred.train_predictor(
        examples, cfg.predictor_epochs, cfg.seed, cfg.predictor_lr
    )
    if cfg.test_path:
        items = load_test_items(cfg.test_path)
    elif cfg.gold_path:
        gold = evaluate.load_unimorph(cfg.gold_path)
        items = derive_eval_items(gold, corpus, cfg)
    else:
        raise DataError("predict stage needs test_path or gold_path")
    save_test_items(items, cfg.path("eval_items.tsv"), cfg.header())
    predictions = []
    for item in items:
        masked = mask_rare(item, corpus, cfg.alpha)
        predictions.append(
            (item.target, slotpred.predict(predictor, item.target, masked, assignment))
        )
    slotpred.save_predictions(predictions, cfg.path("predictions.tsv"), cfg.header())
    log.info("predict: %d items, %d classes", len(items), len(predictor.classes))


def stage_inflect(cfg: PipelineConfig) -> None:
    items = load_test_items(cfg.path("eval_items.tsv"))
    if cfg.inflector == "aligned":
        triples = align.load_triples(cfg.path("triples.tsv"))
        model = inflect.train_aligned_inflector(triples)
        predictions = slotpred.load_predictions(cfg.path("predictions.tsv"))
        if len(predictions) != len(items):
            raise DataError("predictions and eval items disagree in length")
        paradigms = []
        for word, pred in predictions:
            entries: dict[str, str] = {}
            for slot in pred.target_slots:
                if slot == pred.source_slot:
                    continue
                generated = inflect.aligned_inflect(model, word, pred.source_slot, slot)
                if generated is not None:
                    entries.setdefault(str(slot), generated)
            entries[str(pred.source_slot)] = word
            paradigms.append(inflect.GeneratedParadigm(word, str(pred.source_slot), entries))
    else:
        clustering = cluster.load_clusters(cfg.path("clusters.tsv"))
        stats = inflect.collect_trees(clustering)
        ranked = inflect.rank_trees(stats)
        n = inflect.choose_n(clustering)
        paradigms = [inflect.baseline_generate(item.target, ranked, n, stats) for item in items]
    inflect.save_generated(paradigms, cfg.path(f"generated_{cfg.inflector}.tsv"), cfg.header())
    log.info("inflect(%s): %d paradigms", cfg.inflector, len(paradigms))


def stage_evaluate(cfg: PipelineConfig) -> evaluate.EvalReport:
    if not cfg.gold_path:
        raise DataError("evaluate stage needs gold_path")
    gold = evaluate.load_unimorph(cfg.gold_path)
    generated = inflect.load_generated(cfg.path(f"generated_{cfg.inflector}.tsv"))
    if len(generated) != len(gold):
        raise DataError(
            f"generated paradigms ({len(generated)}) and gold paradigms "
            f"({len(gold)}) disagree; eval items must be derived from the gold file"
        )
    rep = evaluate.bmacc(generated, gold, cfg.bmacc_average)
    clustering = cluster.load_clusters(cfg.path("clusters.tsv"))
    rep.bmf1 = evaluate.bmf1(clustering, [set(g.slots.values()) for g in gold])
    payload = evaluate.report_to_dict(rep, cfg.config_hash(), cfg.seed)
    with open(cfg.path(f"report_{cfg.inflector}.json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
    if cfg.figures:
        matrices = {
            pos: evaluate.agreement_matrix(generated, gold, idxs)
            for pos, idxs in sorted(evaluate.group_by_pos(gold).items())
        }
        sizes = [len(c.forms) for c in clustering.clusters]
        report.render_figures(rep, matrices, sizes, cfg.path(f"figures_{cfg.inflector}"))
    log.info("evaluate(%s): bmacc=%.4f bmf1=%.4f", cfg.inflector, rep.bmacc, rep.bmf1)
    return rep


_STAGE_FNS = {
    "cluster": stage_cluster,
    "align": stage_align,
    "predict": stage_predict,
    "inflect": stage_inflect,
    "evaluate": stage_evaluate,
}


def run_stage(name: str, cfg: PipelineConfig):
    """Run one stage; errors carry the stage name, partial artifacts remain."""
    if name not in _STAGE_FNS:
        raise ConfigError(f"unknown stage {name!r}; stages are {', '.join(STAGES)}")
    os.makedirs(cfg.out_dir, exist_ok=True)
    try:
        return _STAGE_FNS[name](cfg)
    except StageError:
        raise
    except MorphmineError as exc:
        raise StageError(name, exc) from exc
    except OSError as exc:
        # a missing upstream artifact should name the stage and the file
        raise StageError(name, DataError(str(exc))) from exc


def run_pipeline(cfg: PipelineConfig) -> evaluate.EvalReport | None:
    """Run all applicable stages in order; returns the report if gold is set."""
    run_stage("cluster", cfg)
    run_stage("align", cfg)
    if not (cfg.test_path or cfg.gold_path):
        log.info("no test or gold input; stopping after align")
        return None
    run_stage("predict", cfg)
    run_stage("inflect", cfg)
    if not cfg.gold_path:
        return None
    return run_stage("evaluate", cfg)

"""Unsupervised discovery and completion of inflectional paradigms.

The package turns a raw text corpus into clusters of related word forms,
abstracts them into stem-and-pattern paradigms, groups the patterns into
slots, and learns to generate the missing forms of unseen words. See the
pipeline module for the stage graph and the cli module for the entry point.
"""

from .abstract import (
    AbstractForm,
    AbstractParadigm,
    abstractify,
    build_abstract_forms,
    filter_rare,
    longest_common_substring,
    make_pattern,
    substitute,
)
from .align import (
    SlotAssignment,
    SlotID,
    TrainingTriple,
    build_slot_assignment,
    cluster_slots,
    emit_triples,
    jaccard,
    similarity,
)
from .cluster import (
    Clustering,
    ParadigmCluster,
    cluster_baseline,
    drop_singletons,
    load_clusters,
    remove_subset_clusters,
    save_clusters,
)
from .corpus import (
    ContextSample,
    Corpus,
    OOV,
    build_corpus,
    extract_contexts,
    load_corpus,
    mask_rare,
    tokenize,
)
from .embed import (
    EmbeddingTable,
    abstract_form_vector,
    cosine,
    load_embeddings,
    save_embeddings,
    train_embeddings,
)
from .errors import (
    ConfigError,
    DataError,
    InvariantError,
    MissingEmbeddingError,
    MorphmineError,
    StageError,
)
from .evaluate import (
    EvalReport,
    GoldParadigm,
    bmacc,
    bmf1,
    brute_force_bmacc,
    generate_toy_language,
    load_unimorph,
)
from .inflect import (
    EditTree,
    GeneratedParadigm,
    Leaf,
    Node,
    apply_edit_tree,
    baseline_generate,
    build_edit_tree,
    choose_n,
    collect_trees,
    rank_trees,
)
from .pipeline import PipelineConfig, load_config, run_pipeline, run_stage
from .posem import PosModel, assign_pos, em_fit
from .slotpred import SlotPredictor, build_training_data, predict, train_predictor

__version__ = "0.1.0"

__all__ = [
    "AbstractForm",
    "AbstractParadigm",
    "Clustering",
    "ConfigError",
    "ContextSample",
    "Corpus",
    "DataError",
    "EditTree",
    "EmbeddingTable",
    "EvalReport",
    "GeneratedParadigm",
    "GoldParadigm",
    "InvariantError",
    "Leaf",
    "MissingEmbeddingError",
    "MorphmineError",
    "Node",
    "OOV",
    "ParadigmCluster",
    "PipelineConfig",
    "PosModel",
    "SlotAssignment",
    "SlotID",
    "SlotPredictor",
    "StageError",
    "TrainingTriple",
    "abstract_form_vector",
    "abstractify",
    "apply_edit_tree",
    "assign_pos",
    "baseline_generate",
    "bmacc",
    "bmf1",
    "brute_force_bmacc",
    "build_abstract_forms",
    "build_corpus",
    "build_edit_tree",
    "build_slot_assignment",
    "build_training_data",
    "choose_n",
    "cluster_baseline",
    "cluster_slots",
    "collect_trees",
    "cosine",
    "drop_singletons",
    "em_fit",
    "emit_triples",
    "extract_contexts",
    "filter_rare",
    "generate_toy_language",
    "jaccard",
    "load_clusters",
    "load_config",
    "load_corpus",
    "load_embeddings",
    "load_unimorph",
    "longest_common_substring",
    "make_pattern",
    "mask_rare",
    "predict",
    "rank_trees",
    "remove_subset_clusters",
    "run_pipeline",
    "run_stage",
    "save_clusters",
    "save_embeddings",
    "similarity",
    "substitute",
    "tokenize",
    "train_embeddings",
    "train_predictor",
]

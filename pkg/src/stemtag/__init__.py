"""Unsupervised joint part-of-speech tagging and stemming.

Three collapsed Dirichlet-multinomial bigram HMM variants (word-emitting,
stem-emitting, stem-plus-suffix-emitting) trained by collapsed Gibbs
sampling, with an exact enumeration oracle for small instances and
clustering/stemming evaluation metrics.
"""

from stemtag.corpus import (
    BUILTIN_MAPPINGS,
    Corpus,
    CorpusFormatError,
    Interner,
    SplitSupport,
    TagsetMapping,
    Token,
    apply_mapping,
    build_split_support,
    iter_corpus_lines,
    load_builtin_mapping,
    load_corpus,
    load_mapping,
    write_corpus,
)
from stemtag.model import (
    VARIANTS,
    CountTables,
    Hyperparams,
    Model,
    SamplerState,
    cond_tag_dist_w,
    cond_tag_split_dist_s,
    cond_tag_split_dist_sm,
    exact_joint_log_prob,
    log_prob_from_counts,
)
from stemtag.sampler import (
    ICM_INV_TEMP,
    RunResult,
    SamplerConfig,
    Splitmix64,
    init_random,
    run,
    sweep,
)
from stemtag.oracle import (
    BudgetExceededError,
    EnumerationBudget,
    chain_rule_log_prob,
    enumeration_size,
    exact_conditional,
    exact_posterior,
)
from stemtag.metrics import (
    Contingency,
    EvalReport,
    labels_to_contingency,
    many_to_one,
    score_predictions,
    stemming_accuracy,
    variation_of_information,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_MAPPINGS",
    "Corpus",
    "CorpusFormatError",
    "Interner",
    "SplitSupport",
    "TagsetMapping",
    "Token",
    "apply_mapping",
    "build_split_support",
    "iter_corpus_lines",
    "load_builtin_mapping",
    "load_corpus",
    "load_mapping",
    "write_corpus",
    "VARIANTS",
    "CountTables",
    "Hyperparams",
    "Model",
    "SamplerState",
    "cond_tag_dist_w",
    "cond_tag_split_dist_s",
    "cond_tag_split_dist_sm",
    "exact_joint_log_prob",
    "log_prob_from_counts",
    "ICM_INV_TEMP",
    "RunResult",
    "SamplerConfig",
    "Splitmix64",
    "init_random",
    "run",
    "sweep",
    "BudgetExceededError",
    "EnumerationBudget",
    "chain_rule_log_prob",
    "enumeration_size",
    "exact_conditional",
    "exact_posterior",
    "Contingency",
    "EvalReport",
    "labels_to_contingency",
    "many_to_one",
    "score_predictions",
    "stemming_accuracy",
    "variation_of_information",
    "__version__",
]

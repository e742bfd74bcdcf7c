"""Scoring induced tags and stems against gold annotations.

Tagging metrics operate on a contingency table between induced and gold
labels; stemming accuracy is exact string match per token.  Both sides of
the contingency are interned in first-occurrence order, so the same token
stream always yields the same table and therefore bit-identical metric
values, whether the labels arrive as integers from a sampler or strings
from a predictions file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class Contingency:
    """Joint induced-by-gold label counts."""

    def __init__(self, table: np.ndarray):
        table = np.ascontiguousarray(table, dtype=np.int64)
        if table.ndim != 2:
            raise ValueError("contingency table must be 2-d")
        if table.size and table.min() < 0:
            raise ValueError("contingency counts must be nonnegative")
        self.table = table
        self.n = int(table.sum())
        if self.n == 0:
            raise ValueError("contingency table must count at least one token")

    @classmethod
    def from_labels(
        cls, induced: Sequence[int], gold: Sequence[int]
    ) -> "Contingency":
        induced = np.asarray(induced, dtype=np.int64)
        gold = np.asarray(gold, dtype=np.int64)
        if induced.shape != gold.shape or induced.ndim != 1:
            raise ValueError("induced and gold must be 1-d sequences of equal length")
        if induced.size == 0:
            raise ValueError("cannot build a contingency table from zero tokens")
        if induced.min() < 0 or gold.min() < 0:
            raise ValueError("label ids must be nonnegative")
        table = np.zeros((int(induced.max()) + 1, int(gold.max()) + 1), dtype=np.int64)
        np.add.at(table, (induced, gold), 1)
        return cls(table)


def many_to_one(contingency: Contingency) -> float:
    """Map every induced tag to its most frequent gold tag, score accuracy.

    Ties break toward the lower gold-tag index (np.argmax's rule); the tie
    choice cannot change the score, only the mapping.
    """
    table = contingency.table
    best_gold = table.argmax(axis=1)
    matched = int(table[np.arange(table.shape[0]), best_gold].sum())
    return matched / contingency.n


def variation_of_information(contingency: Contingency) -> float:
    """VI in bits: H(induced | gold) + H(gold | induced).

    Computed from integer counts as sum_ij c_ij*(log2 r_i + log2 c_j
    - 2*log2 c_ij) / n, which is exactly 0.0 for identical partitions and
    never negative (log2 is monotone and c_ij <= r_i, c_j).
    """
    table = contingency.table
    row = table.sum(axis=1)
    col = table.sum(axis=0)
    acc = 0.0
    for i in range(table.shape[0]):
        for j in range(table.shape[1]):
            c = int(table[i, j])
            if c == 0:
                continue
            acc += c * (
                (math.log2(int(row[i])) - math.log2(c))
                + (math.log2(int(col[j])) - math.log2(c))
            )
    return acc / contingency.n


def stemming_accuracy(predicted: Sequence[str], gold: Sequence[str]) -> float:
    """Fraction of tokens whose predicted stem string equals the gold stem."""
    if len(predicted) != len(gold):
        raise ValueError(
            f"stem sequences differ in length: {len(predicted)} vs {len(gold)}"
        )
    if len(gold) == 0:
        raise ValueError("stemming_accuracy is undefined on zero tokens")
    correct = sum(1 for p, g in zip(predicted, gold) if p == g)
    return correct / len(gold)


@dataclass
class EvalReport:
    """Metric values plus the run metadata they were produced under.

    stemming_accuracy is None for the word variant (no splits exist) and
    when gold stems are absent; the JSON then omits the field entirely.
    vi_bits uses base-2 entropies.
    """

    many_to_one: float
    vi_bits: float
    stemming_accuracy: Optional[float] = None
    metadata: dict = field(default_factory=dict)

    _META_KEYS = ("variant", "alpha", "beta", "gamma", "seed", "iterations")

    def __post_init__(self):
        unknown = set(self.metadata) - set(self._META_KEYS)
        if unknown:
            raise ValueError(f"unknown metadata keys: {sorted(unknown)}")

    def to_dict(self) -> dict:
        out: dict = {"many_to_one": self.many_to_one, "vi_bits": self.vi_bits}
        if self.stemming_accuracy is not None:
            out["stemming_accuracy"] = self.stemming_accuracy
        out["metadata"] = {k: self.metadata.get(k) for k in self._META_KEYS}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _intern_labels(labels: Sequence[str]) -> tuple[np.ndarray, list[str]]:
    ids: dict[str, int] = {}
    out = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(labels):
        out[i] = ids.setdefault(lab, len(ids))
    return out, list(ids)


def labels_to_contingency(
    induced_labels: Sequence[str], gold_labels: Sequence[str]
) -> tuple[Contingency, list[str], list[str]]:
    """Contingency over string labels, each side in first-occurrence order."""
    if len(induced_labels) != len(gold_labels):
        raise ValueError(
            f"token counts differ: {len(induced_labels)} predicted "
            f"vs {len(gold_labels)} gold"
        )
    induced_ids, induced_names = _intern_labels(induced_labels)
    gold_ids, gold_names = _intern_labels(gold_labels)
    return Contingency.from_labels(induced_ids, gold_ids), induced_names, gold_names


def score_predictions(
    induced_labels: Sequence[str],
    gold_labels: Sequence[str],
    predicted_stems: Optional[Sequence[str]] = None,
    gold_stems: Optional[Sequence[str]] = None,
    metadata: Optional[dict] = None,
) -> EvalReport:
    """One scoring path for both the trainer and the standalone evaluator.

    Labels are strings so that a prediction file round-trips to the exact
    report the training run embedded.  Stems are scored only when both
    sides are present.
    """
    cont, _, _ = labels_to_contingency(induced_labels, gold_labels)
    if (predicted_stems is None) != (gold_stems is None):
        raise ValueError("predicted_stems and gold_stems must be given together")
    stem_acc = None
    if predicted_stems is not None:
        stem_acc = stemming_accuracy(predicted_stems, gold_stems)
    return EvalReport(
        many_to_one=many_to_one(cont),
        vi_bits=variation_of_information(cont),
        stemming_accuracy=stem_acc,
        metadata=dict(metadata) if metadata else {},
    )

"""Random MR-Sort ground truths and the learning sets they label.

Randomness comes from numpy's PCG64.  A master seed is expanded with
``SeedSequence(seed).spawn(2)`` into two independent streams: the first draws
the model, the second draws the reference alternatives.  Both are therefore
reproducible on any platform from the seed alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Alternative, CriteriaSpec, LearningSet, MrSortModel, as_uncs, assign
from .errors import InputError


@dataclass(frozen=True)
class GenConfig:
    n_criteria: int
    n_classes: int
    n_alternatives: int
    seed: int = 0

    def __post_init__(self):
        if self.n_criteria < 1 or self.n_alternatives < 0:
            raise InputError("need at least one criterion and a non-negative alternative count")
        if self.n_classes < 2:
            raise InputError(f"at least two classes are required, got {self.n_classes}")

    def streams(self) -> tuple[np.random.Generator, np.random.Generator]:
        """``(model stream, data stream)`` derived from the master seed."""
        model_seq, data_seq = np.random.SeedSequence(self.seed).spawn(2)
        return np.random.Generator(np.random.PCG64(model_seq)), np.random.Generator(
            np.random.PCG64(data_seq)
        )


def gen_mrsort(cfg: GenConfig, rng: np.random.Generator) -> MrSortModel:
    n, p = cfg.n_criteria, cfg.n_classes
    # frontier values for each criterion: p-1 sorted uniforms
    fr = np.sort(rng.random((n, p - 1)), axis=1)
    cuts = np.sort(rng.random(n - 1))
    weights = np.diff(np.concatenate(([0.0], cuts, [1.0])))
    lam = 0.5 + 0.5 * rng.random()
    while not 0.5 < lam < 1.0:
        lam = 0.5 + 0.5 * rng.random()
    frontiers = tuple(tuple(float(v) for v in fr[:, h]) for h in range(p - 1))
    return MrSortModel(
        CriteriaSpec.default(n), p, frontiers, tuple(float(w) for w in weights), float(lam)
    )


def gen_learning_set(model, count: int, rng: np.random.Generator) -> LearningSet:
    """``count`` uniform profiles on the unit cube, labelled by ``model``."""
    uncs = as_uncs(model)
    pts = rng.random((count, uncs.criteria.count))
    alts = []
    for j, row in enumerate(pts):
        prof = tuple(float(v) for v in row)
        alts.append(Alternative(f"a{j + 1}", prof, assign(uncs, prof)))
    return LearningSet(uncs.criteria, uncs.classes, tuple(alts))


def generate(cfg: GenConfig) -> tuple[MrSortModel, LearningSet]:
    model_rng, data_rng = cfg.streams()
    model = gen_mrsort(cfg, model_rng)
    return model, gen_learning_set(model, cfg.n_alternatives, data_rng)

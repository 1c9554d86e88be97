"""Two-stage hyperparameter search for the boosted-tree classifier.

Stage one trains the classifier at k sampled points, records their true
validation losses, and fits the evaluation network on those samples.
Stage two draws fresh candidates around the best seeds via the
closed-form marginal of the cosine sampling chain, ranks them with the
evaluation network, and spends the rest of the budget verifying the
most promising ones with real training runs.  The returned point always
carries a verified loss.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from clonescope.diffusion import DiffusionSchedule, marginal_sample
from clonescope.errors import BudgetTooSmall
from clonescope.evalnet import EvalNet, train_eval_net
from clonescope.gbdt import (
    HYPER_DIM,
    GbdtModel,
    HyperPoint,
    cross_entropy_xy,
    pairs_to_arrays,
    train_xy,
)


@dataclass(frozen=True)
class EvalRecord:
    """One verified hyperparameter evaluation."""

    point: tuple[float, ...]  # unit-cube coordinates
    loss: float
    stage: int

    def to_json(self) -> dict:
        return {"point": list(self.point), "loss": self.loss, "stage": self.stage}


@dataclass(frozen=True)
class OptimizationResult:
    best: HyperPoint
    best_loss: float
    history: tuple[EvalRecord, ...]
    surrogate: EvalNet
    seeds: tuple[EvalRecord, ...] = ()  # stage-two seed points, ascending loss


def _true_loss(
    unit_point: np.ndarray,
    X_train: np.ndarray,
    y_train: np.ndarray,
    X_val: np.ndarray,
    y_val: np.ndarray,
    seed: int,
) -> float:
    hyper = HyperPoint.from_unit(unit_point)
    model = train_xy(X_train, y_train, hyper, seed)
    return cross_entropy_xy(X_val, y_val, model)


def optimize(
    train_pairs,
    val_pairs,
    *,
    budget: int = 128,
    k: int = 64,
    steps: int = 8,
    seed: int = 0,
    seeds_kept: int | None = None,
    surrogate_epochs: int = 2000,
) -> OptimizationResult:
    """Search the unit cube for the hyperparameters with lowest validation loss.

    ``budget`` counts true-loss evaluations (each one trains a model);
    stage one consumes ``k`` of them, stage two the remainder.  The
    default configuration is included among the stage-one samples so the
    result can never be worse than it.
    """
    if k < 2:
        raise BudgetTooSmall("k must be at least 2")
    if budget < k:
        raise BudgetTooSmall(f"budget {budget} cannot cover the initial sample k={k}")

    X_train, y_train = pairs_to_arrays(list(train_pairs))
    X_val, y_val = pairs_to_arrays(list(val_pairs))

    root = np.random.SeedSequence(seed)
    sample_seq, noise_seq, train_seq = root.spawn(3)
    sample_rng = np.random.default_rng(sample_seq)
    noise_rng = np.random.default_rng(noise_seq)
    train_seeds = np.random.default_rng(train_seq).integers(0, 2**31 - 1, size=budget)

    history: list[EvalRecord] = []

    def verify(unit_point: np.ndarray, stage: int) -> float:
        idx = len(history)
        loss = _true_loss(unit_point, X_train, y_train, X_val, y_val, int(train_seeds[idx]))
        history.append(EvalRecord(tuple(float(v) for v in unit_point), loss, stage))
        return loss

    # Stage 1: uniform samples, warm-started with the default configuration.
    stage_one = [HyperPoint().to_unit()]
    stage_one.extend(sample_rng.uniform(0.0, 1.0, size=(k - 1, HYPER_DIM)))
    for point in stage_one:
        verify(np.asarray(point), stage=1)

    surrogate = EvalNet.create(input_dim=HYPER_DIM, seed=seed)
    surrogate = train_eval_net(
        surrogate,
        [(np.asarray(rec.point), rec.loss) for rec in history],
        epochs=surrogate_epochs,
        seed=seed,
    )

    remaining = budget - k
    seed_records: tuple[EvalRecord, ...] = ()
    if remaining > 0:
        kept = seeds_kept if seeds_kept is not None else max(3, k // 10)
        seed_records = tuple(sorted(history, key=lambda rec: rec.loss)[:kept])
        seed_points = [np.asarray(rec.point) for rec in seed_records]
        schedule = DiffusionSchedule.cosine(steps)

        candidates: list[np.ndarray] = []
        while len(candidates) < remaining:
            for seed_point in seed_points:
                for t in range(1, steps + 1):
                    noise = noise_rng.standard_normal(HYPER_DIM)
                    sampled = marginal_sample(seed_point, t, schedule, noise)
                    candidates.append(np.clip(sampled, 0.0, 1.0))

        scores = surrogate.predict(np.asarray(candidates))
        order = np.argsort(scores, kind="stable")
        for idx in order[:remaining]:
            verify(candidates[int(idx)], stage=2)

    best_record = min(history, key=lambda rec: rec.loss)
    best = HyperPoint.from_unit(np.asarray(best_record.point))
    return OptimizationResult(
        best=best,
        best_loss=best_record.loss,
        history=tuple(history),
        surrogate=surrogate,
        seeds=seed_records,
    )


def train_with(
    train_pairs,
    hyper: HyperPoint,
    seed: int,
) -> GbdtModel:
    """Convenience wrapper mirroring the search's training path."""
    X, y = pairs_to_arrays(list(train_pairs))
    return train_xy(X, y, hyper, seed)

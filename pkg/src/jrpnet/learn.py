"""Score discretization, sparse logistic classification, cross-validation.

Self-reported scores on the 1..9 scale become three classes (low,
medium, high).  Classification is one-vs-rest L1-penalized logistic
regression fit by cyclic coordinate descent on internally standardized
features; the penalty uses the mean-loss form

    (1/n) sum_i logloss_i + lambda * ||beta||_1

so the same lambda means the same amount of shrinkage regardless of
sample count.  Model selection is stratified k-fold cross-validation
over a log-spaced lambda grid, preferring the sparser (larger) lambda on
ties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import InputError, NumericError
from .seeding import generator

__all__ = [
    "CLASS_ORDER",
    "FeatureTable",
    "SparseLinearModel",
    "CrossValResult",
    "discretize_score",
    "fit_lasso",
    "predict",
    "lambda_grid",
    "cross_validate",
    "model_to_dict",
    "model_from_dict",
]

#: Canonical class order; ties in argmax resolve toward the earlier class.
CLASS_ORDER = ("low", "medium", "high")

MAX_SWEEPS = 10_000
COORD_TOL = 1e-6
GRID_POINTS = 20
GRID_SPAN = 1e-3

#: Probability clamp for the working weights; saturated points get
#: probability exactly 0 or 1 and this floor weight, keeping the working
#: response finite for correctly classified points.
WEIGHT_FLOOR = 1e-5


@dataclass(frozen=True)
class FeatureTable:
    """Per-trial feature matrix with optional class labels per target."""

    trial_ids: tuple[str, ...]
    columns: tuple[str, ...]
    X: np.ndarray
    labels: dict[str, tuple[str, ...]]

    def __post_init__(self) -> None:
        if self.X.shape != (len(self.trial_ids), len(self.columns)):
            raise InputError(
                f"feature matrix shape {self.X.shape} does not match "
                f"{len(self.trial_ids)} trials x {len(self.columns)} columns"
            )
        for target, classes in self.labels.items():
            if len(classes) != len(self.trial_ids):
                raise InputError(f"label column {target!r} has wrong length")


@dataclass(frozen=True)
class SparseLinearModel:
    """One-vs-rest L1 logistic model in standardized feature space."""

    columns: tuple[str, ...]
    classes: tuple[str, ...]
    weights: np.ndarray  # (n_classes, n_features)
    intercepts: np.ndarray  # (n_classes,)
    mean: np.ndarray
    scale: np.ndarray
    lam: float


@dataclass(frozen=True)
class CrossValResult:
    """Cross-validation outcome for one target and feature table."""

    accuracy: float
    confusion: np.ndarray  # (3, 3) rows true, cols predicted, CLASS_ORDER
    selected_lambda: float
    fold_accuracies: tuple[float, ...]
    lambda_grid: tuple[float, ...]
    mean_accuracy_per_lambda: tuple[float, ...]


def discretize_score(score: float) -> str:
    """Map a score in [1, 9] onto low [1,4), medium [4,6), high [6,9]."""
    if not 1.0 <= score <= 9.0:
        raise InputError(f"score {score} outside [1, 9]")
    if score < 4.0:
        return "low"
    if score < 6.0:
        return "medium"
    return "high"


def _soft(value: float, threshold: float) -> float:
    if value > threshold:
        return value - threshold
    if value < -threshold:
        return value + threshold
    return 0.0


def _standardize(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale > 0.0, scale, 1.0)
    return (X - mean) / scale, mean, scale


def _fit_binary(
    XsT: np.ndarray,
    y: np.ndarray,
    lam: float,
    init: tuple[np.ndarray, float] | None = None,
) -> tuple[np.ndarray, float]:
    """Cyclic coordinate descent for one penalized logistic regression.

    Outer iterations form the quadratic (working-response) approximation
    of the logistic loss at the current iterate; inner cyclic coordinate
    sweeps solve that weighted lasso subproblem with soft-threshold
    updates.  The intercept is unpenalized.  ``XsT`` holds one contiguous
    row per feature.  ``init`` warm-starts from a nearby solution, e.g.
    the previous point on a descending lambda path.  Convergence: no
    coefficient moves by COORD_TOL or more across a full outer step, or
    the total inner sweep budget MAX_SWEEPS is spent.
    """
    p, n = XsT.shape
    if init is None:
        beta = np.zeros(p)
        ybar = float(y.mean())
        intercept = math.log(ybar / (1.0 - ybar))
        z = XsT.T @ beta + intercept
    else:
        beta = init[0].copy()
        intercept = float(init[1])
        z = XsT.T @ beta + intercept

    inv_n = 1.0 / n
    sweeps_left = MAX_SWEEPS
    while sweeps_left > 0:
        prob = expit(z)
        w = prob * (1.0 - prob)
        low = prob < WEIGHT_FLOOR
        high = prob > 1.0 - WEIGHT_FLOOR
        prob[low] = 0.0
        prob[high] = 1.0
        w[low | high] = WEIGHT_FLOOR

        # Inner CD state: rq = current quadratic residual zq - u where
        # u = z + (y - prob)/w is the working response.
        rq = -(y - prob) / w
        WX = XsT * w
        h = (WX * XsT).sum(axis=1) * inv_n
        h0 = w.sum() * inv_n
        outer_max = 0.0

        while sweeps_left > 0:
            sweeps_left -= 1
            delta_max = 0.0

            step = -(w @ rq) * inv_n / h0
            if step != 0.0:
                intercept += step
                rq += step
                delta_max = abs(step)

            for j in range(p):
                if h[j] == 0.0:
                    continue
                g = (WX[j] @ rq) * inv_n
                new = _soft(beta[j] * h[j] - g, lam) / h[j]
                change = new - beta[j]
                if change != 0.0:
                    beta[j] = new
                    rq += change * XsT[j]
                    if abs(change) > delta_max:
                        delta_max = abs(change)

            if delta_max > outer_max:
                outer_max = delta_max
            if delta_max < COORD_TOL:
                break

        z = rq + z + (y - prob) / w
        if outer_max < COORD_TOL:
            break
    return beta, intercept


def _target_classes(table: FeatureTable, target: str) -> list[str]:
    if target not in table.labels:
        raise InputError(f"table carries no labels for target {target!r}")
    labels = table.labels[target]
    bad = sorted(set(labels) - set(CLASS_ORDER))
    if bad:
        raise InputError(f"unknown classes {bad}; expected {list(CLASS_ORDER)}")
    return [c for c in CLASS_ORDER if c in labels]


def fit_lasso(table: FeatureTable, target: str, lam: float, seed: int = 0) -> SparseLinearModel:
    """Fit one-vs-rest L1 logistic models for ``target`` at one lambda.

    The solver is deterministic, so ``seed`` does not influence the fit;
    it is part of the signature for interface uniformity with the other
    stages.
    """
    if lam < 0.0:
        raise InputError(f"lambda must be >= 0, got {lam}")
    if not np.all(np.isfinite(table.X)):
        raise InputError("feature table contains non-finite values")
    present = _target_classes(table, target)
    if len(present) < 2:
        raise InputError(
            f"target {target!r} has {len(present)} class(es); need at least 2"
        )
    Xs, mean, scale = _standardize(table.X)
    XsT = np.ascontiguousarray(Xs.T)
    labels = np.array(table.labels[target])
    weights = np.zeros((len(present), len(table.columns)))
    intercepts = np.zeros(len(present))
    for c, cls in enumerate(present):
        y = (labels == cls).astype(float)
        weights[c], intercepts[c] = _fit_binary(XsT, y, lam)
    return SparseLinearModel(
        columns=table.columns,
        classes=tuple(present),
        weights=weights,
        intercepts=intercepts,
        mean=mean,
        scale=scale,
        lam=float(lam),
    )


def predict(model: SparseLinearModel, feature_vector: np.ndarray) -> tuple[str, dict[str, float]]:
    """Predicted class and per-class linear scores for one feature vector.

    Ties resolve toward the earlier class in canonical order.
    """
    x = np.asarray(feature_vector, dtype=float).ravel()
    if x.shape != (len(model.columns),):
        raise InputError(
            f"feature vector has {x.size} entries, model expects {len(model.columns)}"
        )
    xs = (x - model.mean) / model.scale
    scores = model.weights @ xs + model.intercepts
    winner = model.classes[int(np.argmax(scores))]
    return winner, {cls: float(s) for cls, s in zip(model.classes, scores)}


def _predict_rows(model: SparseLinearModel, X: np.ndarray) -> list[str]:
    Xs = (X - model.mean) / model.scale
    scores = Xs @ model.weights.T + model.intercepts
    return [model.classes[k] for k in np.argmax(scores, axis=1)]


def lambda_grid(
    table: FeatureTable,
    target: str,
    points: int = GRID_POINTS,
    span: float = GRID_SPAN,
) -> tuple[float, ...]:
    """Log-spaced grid from the smallest all-zeroing lambda down by ``span``.

    lambda_max is the largest absolute mean gradient of any standardized
    feature at the intercept-only fit, maximized over the one-vs-rest
    subproblems; beyond it every penalized weight stays zero.
    """
    if points < 2:
        raise InputError(f"grid needs at least 2 points, got {points}")
    present = _target_classes(table, target)
    Xs, _, _ = _standardize(table.X)
    labels = np.array(table.labels[target])
    lam_max = 0.0
    for cls in present:
        y = (labels == cls).astype(float)
        lam_max = max(lam_max, float(np.abs(Xs.T @ (y - y.mean())).max()) / len(y))
    if lam_max <= 0.0:
        raise NumericError("all features are uninformative; lambda grid is degenerate")
    # tiny headroom so round-off in the solver's first gradient pass can
    # never nudge a weight off zero at the head of the grid
    lam_max *= 1.0 + 1e-10
    return tuple(np.geomspace(lam_max, lam_max * span, points))


def _stratified_folds(labels: np.ndarray, k: int, seed: int) -> np.ndarray:
    fold_of = np.empty(len(labels), dtype=int)
    rng = generator(seed, "cv-folds")
    for cls in CLASS_ORDER:
        members = np.nonzero(labels == cls)[0]
        if members.size == 0:
            continue
        if members.size < k:
            raise InputError(
                f"class {cls!r} has {members.size} members; need at least {k} "
                f"for {k}-fold cross-validation"
            )
        members = members[rng.permutation(members.size)]
        fold_of[members] = np.arange(members.size) % k
    return fold_of


def cross_validate(
    table: FeatureTable,
    target: str,
    lambdas: tuple[float, ...] | None = None,
    k: int = 5,
    seed: int = 0,
) -> CrossValResult:
    """Stratified k-fold cross-validation over a lambda grid.

    The reported accuracy and confusion matrix pool the validation
    predictions of every fold at the selected lambda.
    """
    if k < 2:
        raise InputError(f"k must be >= 2, got {k}")
    present = _target_classes(table, target)
    if len(present) < 2:
        raise InputError(f"target {target!r} needs at least 2 classes")
    if not np.all(np.isfinite(table.X)):
        raise InputError("feature table contains non-finite values")
    if lambdas is None:
        lambdas = lambda_grid(table, target)
    grid = sorted((float(l) for l in lambdas), reverse=True)
    labels = np.array(table.labels[target])
    fold_of = _stratified_folds(labels, k, seed)

    predictions = np.empty((len(grid), len(labels)), dtype=object)
    for fold in range(k):
        train = fold_of != fold
        val = ~train
        fold_classes = [c for c in CLASS_ORDER if c in labels[train]]
        if len(fold_classes) < 2:
            raise InputError(f"fold {fold} training split has fewer than 2 classes")
        Xs, mean, scale = _standardize(table.X[train])
        XsT = np.ascontiguousarray(Xs.T)
        ys = [(labels[train] == cls).astype(float) for cls in fold_classes]
        Xval = (table.X[val] - mean) / scale
        # Descend the grid, warm-starting each class's fit from the
        # previous lambda; the converged solutions match cold starts
        # within the coordinate tolerance at a fraction of the sweeps.
        inits: list[tuple[np.ndarray, float] | None] = [None] * len(fold_classes)
        for g, lam in enumerate(grid):
            W = np.zeros((len(fold_classes), len(table.columns)))
            b = np.zeros(len(fold_classes))
            for c in range(len(fold_classes)):
                W[c], b[c] = _fit_binary(XsT, ys[c], lam, inits[c])
                inits[c] = (W[c], b[c])
            scores = Xval @ W.T + b
            predictions[g, val] = [fold_classes[i] for i in np.argmax(scores, axis=1)]

    fold_acc = np.empty((len(grid), k))
    for g in range(len(grid)):
        for fold in range(k):
            val = fold_of == fold
            fold_acc[g, fold] = float(np.mean(predictions[g, val] == labels[val]))
    mean_acc = fold_acc.mean(axis=1)
    best = int(np.argmax(mean_acc))  # grid is descending, so ties pick larger lambda

    pooled = predictions[best]
    accuracy = float(np.mean(pooled == labels))
    confusion = np.zeros((len(CLASS_ORDER), len(CLASS_ORDER)), dtype=int)
    order = {cls: i for i, cls in enumerate(CLASS_ORDER)}
    for true, pred in zip(labels, pooled):
        confusion[order[true], order[pred]] += 1
    return CrossValResult(
        accuracy=accuracy,
        confusion=confusion,
        selected_lambda=grid[best],
        fold_accuracies=tuple(fold_acc[best]),
        lambda_grid=tuple(grid),
        mean_accuracy_per_lambda=tuple(mean_acc),
    )


def model_to_dict(model: SparseLinearModel) -> dict:
    """JSON-ready representation of a fitted model."""
    return {
        "schema_version": 1,
        "columns": list(model.columns),
        "classes": list(model.classes),
        "weights": [list(map(float, row)) for row in model.weights],
        "intercepts": [float(v) for v in model.intercepts],
        "mean": [float(v) for v in model.mean],
        "scale": [float(v) for v in model.scale],
        "lambda": float(model.lam),
    }


def model_from_dict(raw: dict) -> SparseLinearModel:
    """Inverse of :func:`model_to_dict`."""
    try:
        if raw["schema_version"] != 1:
            raise InputError(f"unsupported model schema {raw['schema_version']}")
        return SparseLinearModel(
            columns=tuple(raw["columns"]),
            classes=tuple(raw["classes"]),
            weights=np.array(raw["weights"], dtype=float),
            intercepts=np.array(raw["intercepts"], dtype=float),
            mean=np.array(raw["mean"], dtype=float),
            scale=np.array(raw["scale"], dtype=float),
            lam=float(raw["lambda"]),
        )
    except KeyError as exc:
        raise InputError(f"model JSON lacks required key {exc}") from exc

"""Dataset container, CSV ingestion, splitting/subsampling, and synthetic generators."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Raised for malformed input data or invalid generator parameters."""


def _rng(seed, *extra) -> np.random.Generator:
    """Derive an independent generator from a base seed and optional stream keys."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, extra)]))


@dataclass(frozen=True)
class Dataset:
    """Numeric feature matrix with integer class labels and optional feature blocks.

    ``block_matrix`` is a W x N binary matrix; row w marks the features
    belonging to block w. Immutable after construction.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    block_matrix: np.ndarray | None = None

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if feats.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        if feats.shape[0] != labels.shape[0]:
            raise DataError(
                f"row mismatch: {feats.shape[0]} feature rows vs {labels.shape[0]} labels"
            )
        if len(self.feature_names) != feats.shape[1]:
            raise DataError("feature_names length must match feature count")
        if self.block_matrix is not None:
            B = np.asarray(self.block_matrix, dtype=int)
            object.__setattr__(self, "block_matrix", B)
            if B.ndim != 2 or B.shape[1] != feats.shape[1]:
                raise DataError("block_matrix must have one column per feature")
            if not np.isin(B, (0, 1)).all():
                raise DataError("block_matrix entries must be 0 or 1")
        feats.setflags(write=False)
        labels.setflags(write=False)
        if self.block_matrix is not None:
            self.block_matrix.setflags(write=False)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_blocks(self) -> int:
        return 0 if self.block_matrix is None else self.block_matrix.shape[0]

    def take(self, rows: np.ndarray) -> "Dataset":
        """New Dataset restricted to the given row indices."""
        return Dataset(
            self.features[rows], self.labels[rows], self.feature_names, self.block_matrix
        )


@dataclass(frozen=True)
class GroundTruth:
    """Feature indices (0-based) known relevant by construction."""

    relevant: frozenset[int]
    # generator noise, kept so labels can be recomputed in tests
    noise: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "relevant", frozenset(int(i) for i in self.relevant))


def load_csv(path, label_column: str, block_spec: dict | None = None) -> Dataset:
    """Read a headered numeric CSV into a Dataset.

    ``block_spec`` maps block names to lists of feature names; it is turned
    into the block matrix (rows ordered by block name insertion order).
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not in header {header}")
        label_idx = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_idx]
        rows, labels = [], []
        for lineno, record in enumerate(reader, start=2):
            if len(record) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} cells, got {len(record)}")
            vals = []
            for col, cell in zip(header, record):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}:{lineno}: non-numeric value {cell!r} in column {col!r}"
                    ) from None
            labels.append(vals.pop(label_idx))
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows")
    block_matrix = None
    if block_spec:
        block_matrix = build_block_matrix(block_spec, feature_names)
    return Dataset(np.array(rows), np.array(labels, dtype=float).astype(int),
                   feature_names, block_matrix)


def build_block_matrix(block_spec: dict, feature_names) -> np.ndarray:
    """W x N binary matrix from a {block name: [feature names]} mapping."""
    index = {name: i for i, name in enumerate(feature_names)}
    B = np.zeros((len(block_spec), len(feature_names)), dtype=int)
    for w, (block, members) in enumerate(block_spec.items()):
        for name in members:
            if name not in index:
                raise DataError(f"block {block!r} references unknown feature {name!r}")
            B[w, index[name]] = 1
    return B


def _per_class_counts(labels: np.ndarray, total: int, fraction: float) -> dict:
    """Per-class sample counts: round(fraction * class size), nudged to hit ``total``."""
    classes, sizes = np.unique(labels, return_counts=True)
    counts = {c: round(fraction * s) for c, s in zip(classes, sizes)}
    sizes = dict(zip(classes, sizes))
    # adjust by +-1 per class, preferring the largest remainder first
    order = sorted(classes, key=lambda c: -(fraction * sizes[c] - int(fraction * sizes[c])))
    i = 0
    while sum(counts.values()) > total:
        c = order[i % len(order)]
        if counts[c] > 0:
            counts[c] -= 1
        i += 1
    i = 0
    while sum(counts.values()) < total:
        c = order[i % len(order)]
        if counts[c] < sizes[c]:
            counts[c] += 1
        i += 1
    return counts


def stratified_split(d: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Split into disjoint train/test parts preserving class proportions."""
    if not 0 < train_fraction < 1:
        raise DataError(f"train_fraction must be in (0, 1), got {train_fraction}")
    classes, sizes = np.unique(d.labels, return_counts=True)
    if len(classes) < 2:
        raise DataError("need at least two classes for a stratified split")
    if sizes.min() < 2:
        raise DataError("every class needs at least two samples")
    rng = _rng(seed)
    total_train = round(train_fraction * d.n_samples)
    counts = _per_class_counts(d.labels, total_train, train_fraction)
    train_idx = []
    for c in classes:
        members = np.flatnonzero(d.labels == c)
        picked = rng.choice(members, size=counts[c], replace=False)
        train_idx.append(picked)
    train_idx = np.sort(np.concatenate(train_idx))
    mask = np.zeros(d.n_samples, dtype=bool)
    mask[train_idx] = True
    return d.take(np.flatnonzero(mask)), d.take(np.flatnonzero(~mask))


def subsample(d: Dataset, fraction: float, seed: int) -> Dataset:
    """Draw floor(fraction * rows) rows without replacement, stratified by class."""
    if not 0 < fraction <= 1:
        raise DataError(f"fraction must be in (0, 1], got {fraction}")
    total = int(np.floor(fraction * d.n_samples))
    rng = _rng(seed)
    counts = _per_class_counts(d.labels, total, fraction)
    idx = []
    for c in sorted(counts):
        members = np.flatnonzero(d.labels == c)
        idx.append(rng.choice(members, size=counts[c], replace=False))
    return d.take(np.sort(np.concatenate(idx)))


def _threshold_label(z: np.ndarray) -> np.ndarray:
    return (z >= 0).astype(int)


def gen_additive(n_rows: int, n_features: int, seed: int) -> tuple[Dataset, GroundTruth]:
    """Gaussian features with an additive nonlinear rule on the first four."""
    if n_features < 4:
        raise DataError("gen_additive needs at least 4 features")
    rng = _rng(seed)
    X = rng.standard_normal((n_rows, n_features))
    eps = rng.standard_normal(n_rows)
    z = -2 * np.sin(2 * X[:, 0]) + X[:, 1] ** 2 + X[:, 2] + np.exp(-X[:, 3]) + eps
    names = [f"x{i + 1}" for i in range(n_features)]
    d = Dataset(X, _threshold_label(z), names)
    return d, GroundTruth({0, 1, 2, 3}, noise=eps)


def gen_nonadditive(n_rows: int, n_features: int, seed: int) -> tuple[Dataset, GroundTruth]:
    """Gaussian features with a multiplicative rule on the first three."""
    if n_features < 3:
        raise DataError("gen_nonadditive needs at least 3 features")
    rng = _rng(seed)
    X = rng.standard_normal((n_rows, n_features))
    eps = rng.standard_normal(n_rows)
    z = X[:, 0] * np.exp(2 * X[:, 1]) + X[:, 2] ** 2 + eps
    names = [f"x{i + 1}" for i in range(n_features)]
    d = Dataset(X, _threshold_label(z), names)
    return d, GroundTruth({0, 1, 2}, noise=eps)


def gen_blocked(
    n_rows: int,
    n_blocks: int,
    block_size: int,
    relevant_blocks: int,
    informative_per_block: int,
    redundant_blocks: int,
    redundant_per_block: int,
    seed: int,
) -> tuple[Dataset, GroundTruth]:
    """Block-structured classification data with informative, redundant, and noise features.

    Informative features follow class-conditional unit-variance Gaussian
    clusters centered on distinct hypercube vertices. Redundant features are
    random linear combinations of the informative ones plus small noise.
    Blocks 1..relevant_blocks host informative features; the last
    ``redundant_blocks`` blocks host redundant features (the two groups may
    share blocks if capacity allows). Feature positions are shuffled within
    each block.
    """
    params = dict(n_rows=n_rows, n_blocks=n_blocks, block_size=block_size,
                  relevant_blocks=relevant_blocks, informative_per_block=informative_per_block,
                  redundant_blocks=redundant_blocks, redundant_per_block=redundant_per_block)
    if any(v <= 0 for v in params.values()):
        raise DataError(f"all generator counts must be positive: {params}")
    if relevant_blocks > n_blocks or redundant_blocks > n_blocks:
        raise DataError("block group counts exceed the number of blocks")
    n_features = n_blocks * block_size
    n_inform = relevant_blocks * informative_per_block
    n_redund = redundant_blocks * redundant_per_block
    # redundant blocks are taken from the end; overlapping blocks must fit both roles
    overlap = max(0, relevant_blocks + redundant_blocks - n_blocks)
    if informative_per_block > block_size or redundant_per_block > block_size:
        raise DataError("per-block feature counts exceed block_size")
    if overlap and informative_per_block + redundant_per_block > block_size:
        raise DataError("overlapping relevant/redundant blocks exceed block_size")

    rng = _rng(seed)
    half = n_rows // 2
    y = np.concatenate([np.zeros(half, dtype=int), np.ones(n_rows - half, dtype=int)])
    rng.shuffle(y)
    # class centroids on distinct hypercube vertices with coordinates +-1
    centers = rng.choice([-1.0, 1.0], size=(2, n_inform))
    while (centers[0] == centers[1]).all():
        centers[1] = rng.choice([-1.0, 1.0], size=n_inform)
    informative = centers[y] + rng.standard_normal((n_rows, n_inform))
    weights = rng.uniform(-1.0, 1.0, size=(n_inform, n_redund))
    redundant = informative @ weights + 0.05 * rng.standard_normal((n_rows, n_redund))

    columns = np.empty((n_rows, n_features))
    block_of = np.repeat(np.arange(n_blocks), block_size)
    slots = {w: list(range(w * block_size, (w + 1) * block_size)) for w in range(n_blocks)}
    for w in slots:
        rng.shuffle(slots[w])
    informative_idx = []
    col = 0
    for w in range(relevant_blocks):
        for _ in range(informative_per_block):
            pos = slots[w].pop()
            columns[:, pos] = informative[:, col]
            informative_idx.append(pos)
            col += 1
    col = 0
    for w in range(n_blocks - redundant_blocks, n_blocks):
        for _ in range(redundant_per_block):
            pos = slots[w].pop()
            columns[:, pos] = redundant[:, col]
            col += 1
    remaining = sorted(i for lst in slots.values() for i in lst)
    columns[:, remaining] = rng.standard_normal((n_rows, len(remaining)))

    B = np.zeros((n_blocks, n_features), dtype=int)
    B[block_of, np.arange(n_features)] = 1
    names = [f"x{i + 1}" for i in range(n_features)]
    d = Dataset(columns, y, names, block_matrix=B)
    return d, GroundTruth(informative_idx)

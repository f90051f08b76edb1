"""Semantic concepts from shape indexes: 1-D k-means vocabularies per index
category, concept labeling, and k-NN classification of descriptor features."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config
from .descriptors import INDEX_COMPONENTS, ShapeIndexVector
from .errors import (
    DegenerateClusters,
    DimensionMismatch,
    EmptyClassifier,
    MissingVocabulary,
    TooFewValues,
)

# Category name -> ShapeIndexVector component. Ellipticity from the concept
# tables is folded into elongation rather than given a formula of its own.
CATEGORY_COMPONENTS = {
    "sphericity": "s1",
    "compactness": "c2",
    "esd_compactness": "c1",
    "elongation": "elongation",
    "radii_ratio": "radii_ratio",
    "surface_convexity": "cs",
    "volume_convexity": "cv",
}

# Concept ID 0 always names the highest-valued cluster.
_LEVEL_NAMES = ("High", "Average", "small", "smaller")

# Feature subsets for classification; the reduced preset carries the index
# triple that proved most reliable in evaluation.
FEATURE_PRESETS = {
    "all": INDEX_COMPONENTS,
    "sphericity_convexity_elongation": ("s1", "cs", "cv", "elongation"),
}


def concept_labels(category: str, k: int) -> tuple[str, ...]:
    display = category.replace("_", " ")
    display = display[:1].upper() + display[1:]
    names = list(_LEVEL_NAMES[:k])
    while len(names) < k:
        names.append(f"smaller ({len(names) - 2})")
    return tuple(f"{name} {display}" for name in names)


@dataclass
class ConceptVocabulary:
    category: str
    centers: np.ndarray  # strictly descending, so ID 0 = highest values
    labels: tuple[str, ...]

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=np.float64)
        if len(self.labels) != len(self.centers):
            raise DegenerateClusters("labels/centers length mismatch")
        if np.any(np.diff(self.centers) >= 0.0):
            raise DegenerateClusters("cluster centers are not strictly descending")

    @property
    def k(self) -> int:
        return len(self.centers)


@dataclass
class SemanticLabel:
    """One concept ID per vocabulary category."""

    concepts: dict[str, int]

    def items(self):
        return sorted(self.concepts.items())


def _kmeans_1d(
    values: np.ndarray, k: int, rng: np.random.Generator, sse_trace: list | None = None
) -> np.ndarray:
    """Lloyd's algorithm on scalars with k-means++ seeding.

    Runs to an assignment fixpoint or KMEANS_MAX_ITER. An emptied cluster is
    re-seeded at the value farthest from its current center, which keeps k
    live clusters whenever k distinct values exist. sse_trace, when given,
    collects the objective after every update step.
    """
    n = len(values)
    centers = np.empty(k)
    centers[0] = values[int(rng.integers(n))]
    d2 = (values - centers[0]) ** 2
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            raise DegenerateClusters("not enough distinct values to seed centers")
        centers[j] = values[int(rng.choice(n, p=d2 / total))]
        d2 = np.minimum(d2, (values - centers[j]) ** 2)

    assign = np.full(n, -1)
    for _ in range(config.KMEANS_MAX_ITER):
        dist = np.abs(values[:, None] - centers[None, :])
        new_assign = np.argmin(dist, axis=1)
        for j in range(k):
            picked = new_assign == j
            if picked.any():
                centers[j] = values[picked].mean()
            else:
                stray = int(np.argmax(np.abs(values - centers[new_assign])))
                centers[j] = values[stray]
                new_assign[stray] = j
        if sse_trace is not None:
            sse_trace.append(float(((values - centers[new_assign]) ** 2).sum()))
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
    return centers


def build_vocabulary(values, k: int, seed: int, category: str = "index") -> ConceptVocabulary:
    """Cluster one index's corpus values into k concept levels."""
    vals = np.asarray(values, dtype=np.float64).ravel()
    if k < 1:
        raise TooFewValues("k must be at least 1")
    if len(vals) < k:
        raise TooFewValues(f"{len(vals)} values for {k} clusters")
    if not np.isfinite(vals).all():
        raise TooFewValues("values must be finite")
    if len(np.unique(vals)) < k:
        raise DegenerateClusters(f"fewer than {k} distinct values")

    if k == 1:
        centers = np.array([vals.mean()])
    else:
        centers = _kmeans_1d(vals, k, np.random.default_rng(seed))
    centers = np.sort(centers)[::-1]
    return ConceptVocabulary(category, centers, concept_labels(category, k))


def assign_concept(value: float, vocab: ConceptVocabulary) -> int:
    """ID of the nearest center; ties resolve to the smaller ID."""
    return int(np.argmin(np.abs(vocab.centers - value)))


def label_model(indexes: ShapeIndexVector, vocabularies: dict[str, ConceptVocabulary]) -> SemanticLabel:
    if not vocabularies:
        raise MissingVocabulary("no vocabularies provided")
    concepts = {}
    for category, vocab in vocabularies.items():
        component = CATEGORY_COMPONENTS.get(category)
        if component is None:
            raise MissingVocabulary(f"category {category!r} has no index component")
        concepts[category] = assign_concept(getattr(indexes, component), vocab)
    return SemanticLabel(concepts)


@dataclass
class Classifier:
    """k-NN over z-scored shape-index features."""

    features: np.ndarray  # (n, d), already normalized
    class_ids: np.ndarray  # (n,)
    k: int
    feature_names: tuple[str, ...]
    means: np.ndarray
    stds: np.ndarray
    class_names: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.class_ids = np.asarray(self.class_ids, dtype=np.int64)
        n = len(self.features)
        if n and (self.k < 1 or self.k > n):
            self.k = max(1, min(self.k, n))

    @property
    def size(self) -> int:
        return len(self.features)

    def normalize(self, raw: np.ndarray) -> np.ndarray:
        safe = np.where(self.stds > 0.0, self.stds, 1.0)
        z = (np.asarray(raw, dtype=np.float64) - self.means) / safe
        return np.where(self.stds > 0.0, z, 0.0)

    def features_from_indexes(self, indexes: ShapeIndexVector) -> np.ndarray:
        raw = np.array([getattr(indexes, n) for n in self.feature_names])
        return self.normalize(raw)


def train_classifier(
    raw_features: np.ndarray,
    class_ids,
    k: int = config.DEFAULT_KNN_K,
    feature_names: tuple[str, ...] = FEATURE_PRESETS["all"],
    class_names: tuple[str, ...] = (),
) -> Classifier:
    """z-score the raw training features and freeze them with their stats."""
    raw = np.asarray(raw_features, dtype=np.float64)
    means = raw.mean(axis=0) if len(raw) else np.zeros(len(feature_names))
    stds = raw.std(axis=0) if len(raw) else np.ones(len(feature_names))
    safe = np.where(stds > 0.0, stds, 1.0)
    normalized = np.where(stds > 0.0, (raw - means) / safe, 0.0)
    return Classifier(
        features=normalized,
        class_ids=np.asarray(class_ids, dtype=np.int64),
        k=k,
        feature_names=tuple(feature_names),
        means=means,
        stds=stds,
        class_names=tuple(class_names),
    )


def classify(query: np.ndarray, model: Classifier) -> int:
    """Majority vote among the k nearest training records.

    Vote ties go to the class of the nearest neighbor among the tied classes.
    """
    if model.size == 0:
        raise EmptyClassifier("classifier has no training records")
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (model.features.shape[1],):
        raise DimensionMismatch(
            f"query has shape {q.shape}, classifier expects {model.features.shape[1]} features"
        )
    dist = np.linalg.norm(model.features - q, axis=1)
    order = np.argsort(dist, kind="stable")[: model.k]
    votes: dict[int, int] = {}
    for idx in order:
        cid = int(model.class_ids[idx])
        votes[cid] = votes.get(cid, 0) + 1
    top = max(votes.values())
    tied = {cid for cid, count in votes.items() if count == top}
    for idx in order:
        cid = int(model.class_ids[idx])
        if cid in tied:
            return cid
    raise AssertionError("unreachable")

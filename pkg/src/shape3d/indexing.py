"""Offline corpus indexing: run the full per-model pipeline over a directory
of OFF files, then assemble vocabularies, classifier, fact store and stats
into one persisted index.

Timing is recorded in the build report, never in the index file itself, so
two builds with the same seed produce byte-identical indexes.
"""

from __future__ import annotations

import logging
import os
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config
from .descriptors import ModelAnalysis, analyze_mesh
from .errors import (
    DegenerateClusters,
    DegenerateEntity,
    NoModelsFound,
    ShapeEngineError,
    TooFewValues,
    WriteFailure,
)
from .offio import parse_off
from .ontology import FactStore, qualitative_relations, spatial_entities
from .retrieval import (
    ClassMap,
    ModelRecord,
    NormStats,
    RetrievalIndex,
    WeightProfile,
    parse_cla,
    save_index,
)
from .semantics import (
    CATEGORY_COMPONENTS,
    build_vocabulary,
    label_model,
    train_classifier,
)

logger = logging.getLogger(__name__)


@dataclass
class Config:
    corpus_dir: Path
    index_path: Path
    clusters: int = config.DEFAULT_CLUSTERS
    knn_k: int = config.DEFAULT_KNN_K
    weights: WeightProfile = field(default_factory=WeightProfile)
    epsilon_rel: float = config.EPSILON_REL_DEFAULT
    seed: int = 0
    port: int = 8371
    cla_path: Path | None = None
    feature_preset: str = "all"

    def __post_init__(self):
        self.corpus_dir = Path(self.corpus_dir)
        self.index_path = Path(self.index_path)
        if self.clusters < 1 or self.knn_k < 1:
            raise ValueError("clusters and knn_k must be at least 1")
        if not 0.0 < self.epsilon_rel < 0.5:
            raise ValueError("epsilon_rel must lie in (0, 0.5)")


@dataclass
class BuildReport:
    """Wall-clock per model, kept outside the persisted index."""

    timings: dict[str, float] = field(default_factory=dict)
    skipped: list[dict] = field(default_factory=list)

    @property
    def mean_seconds(self) -> float:
        return sum(self.timings.values()) / len(self.timings) if self.timings else 0.0

    @property
    def max_seconds(self) -> float:
        return max(self.timings.values()) if self.timings else 0.0


def _model_id_for(path: Path) -> str:
    return "_".join(path.stem.split())


def _category_seed(seed: int, category: str) -> int:
    return zlib.crc32(f"{seed}:{category}".encode()) & 0xFFFFFFFF


def _class_lookup(classes: ClassMap, model_ids: set[str]) -> dict[str, str]:
    """Match integer benchmark IDs to corpus model ids ("12" or "m12")."""
    lookup: dict[str, str] = {}
    for name, ids in classes.classes.items():
        for n in ids:
            for candidate in (str(n), f"m{n}"):
                if candidate in model_ids:
                    lookup[candidate] = name
    return lookup


def _bucket_class(label) -> str:
    return "b" + "".join(str(cid) for _, cid in label.items())


def build_index(cfg: Config) -> tuple[RetrievalIndex, BuildReport]:
    """Index every parseable OFF under corpus_dir and persist the result."""
    paths = sorted(Path(cfg.corpus_dir).glob("*.off"))
    report = BuildReport()

    analyses: dict[str, ModelAnalysis] = {}
    model_paths: dict[str, str] = {}
    for path in paths:
        model_id = _model_id_for(path)
        started = time.perf_counter()
        try:
            mesh = parse_off(path.read_text(encoding="ascii", errors="replace"), model_id)
            analyses[model_id] = analyze_mesh(mesh)
        except ShapeEngineError as exc:
            logger.warning("skipping %s: %s", path.name, exc)
            report.skipped.append({"file": path.name, "reason": str(exc)})
            continue
        report.timings[model_id] = time.perf_counter() - started
        # Manifest paths are stored relative to the index file so the pair
        # (index, corpus) stays relocatable; cross-drive setups fall back to
        # absolute paths.
        try:
            model_paths[model_id] = os.path.relpath(
                path.resolve(), cfg.index_path.resolve().parent
            )
        except ValueError:
            model_paths[model_id] = str(path.resolve())

    if not analyses:
        raise NoModelsFound(f"no readable .off models under {cfg.corpus_dir}")
    model_ids = sorted(analyses)

    # Per-category concept vocabularies. A category whose corpus values are
    # too repetitive for the requested cluster count degrades gracefully to
    # however many distinct levels exist.
    vocabularies = {}
    for category, component in CATEGORY_COMPONENTS.items():
        values = np.array(
            [getattr(analyses[m].descriptor.indexes, component) for m in model_ids]
        )
        k = min(cfg.clusters, len(np.unique(values)))
        seed = _category_seed(cfg.seed, category)
        try:
            vocabularies[category] = build_vocabulary(values, k, seed, category)
        except (TooFewValues, DegenerateClusters) as exc:
            logger.warning("category %s degraded to k=1: %s", category, exc)
            vocabularies[category] = build_vocabulary(values, 1, seed, category)

    labels = {
        m: label_model(analyses[m].descriptor.indexes, vocabularies) for m in model_ids
    }

    # Ground-truth classes when a .cla is available, concept buckets otherwise.
    cla_path = cfg.cla_path
    if cla_path is None:
        found = sorted(Path(cfg.corpus_dir).glob("*.cla"))
        cla_path = found[0] if found else None
    if cla_path is not None:
        class_lookup = _class_lookup(parse_cla(Path(cla_path).read_text()), set(model_ids))
        class_of = {m: class_lookup.get(m) for m in model_ids}
    else:
        class_of = {m: _bucket_class(labels[m]) for m in model_ids}

    stats = NormStats.from_vectors(
        np.stack([analyses[m].descriptor.flatten() for m in model_ids])
    )

    from .semantics import FEATURE_PRESETS

    feature_names = FEATURE_PRESETS[cfg.feature_preset]
    trainable = [m for m in model_ids if class_of[m] is not None]
    class_names = tuple(sorted({class_of[m] for m in trainable}))
    name_to_id = {name: i for i, name in enumerate(class_names)}
    raw = np.array(
        [
            [getattr(analyses[m].descriptor.indexes, f) for f in feature_names]
            for m in trainable
        ]
    ).reshape(len(trainable), len(feature_names))
    classifier = train_classifier(
        raw,
        [name_to_id[class_of[m]] for m in trainable],
        k=cfg.knn_k,
        feature_names=feature_names,
        class_names=class_names,
    )

    store = FactStore(categories=tuple(CATEGORY_COMPONENTS))
    for m in model_ids:
        analysis = analyses[m]
        try:
            entities = spatial_entities(
                analysis.landmarks,
                analysis.measures.principal_axes,
                analysis.measures.extents,
                analysis.measures,
            )
            relations = qualitative_relations(entities, cfg.epsilon_rel)
        except DegenerateEntity as exc:
            logger.warning("no spatial relations for %s: %s", m, exc)
            relations = []
        store.assert_model(
            m, labels[m], relations, analysis.descriptor.tetra_ratios, analysis.measures
        )
    store.freeze()

    index = RetrievalIndex(
        models={
            m: ModelRecord(
                model_id=m,
                path=model_paths[m],
                class_name=class_of[m],
                descriptor=analyses[m].descriptor,
                label=labels[m],
            )
            for m in model_ids
        },
        vocabularies=vocabularies,
        classifier=classifier,
        store=store,
        stats=stats,
        seed=cfg.seed,
        skipped=report.skipped,
        base_dir=cfg.index_path.resolve().parent,
    )

    try:
        cfg.index_path.parent.mkdir(parents=True, exist_ok=True)
        save_index(index, cfg.index_path)
    except OSError as exc:
        raise WriteFailure(f"cannot write {cfg.index_path}: {exc}") from exc
    return index, report

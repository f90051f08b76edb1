"""Query-by-example retrieval: z-score normalization over the indexed corpus,
weighted group distances, the classify / filter / rank pipeline, precision-
recall evaluation and the benchmark class-file reader."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config
from .descriptors import (
    DESCRIPTOR_DIM,
    DescriptorVector,
    FLAT_COMPONENTS,
    GROUP_SLICES,
    ModelAnalysis,
    analyze_mesh,
)
from .errors import (
    AllZeroWeights,
    CountMismatch,
    DimensionMismatch,
    EmptyIndex,
    EmptyRelevantSet,
    MalformedHeader,
    UnknownModel,
)
from .mesh import Mesh
from .ontology import Fact, FactStore
from .semantics import Classifier, ConceptVocabulary, SemanticLabel, classify, label_model


@dataclass
class NormStats:
    """Per-component corpus mean and stddev; constant components are flagged
    and normalize maps them to zero."""

    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        self.means = np.asarray(self.means, dtype=np.float64)
        self.stds = np.asarray(self.stds, dtype=np.float64)

    @property
    def constant(self) -> np.ndarray:
        return self.stds == 0.0

    @classmethod
    def from_vectors(cls, vectors: np.ndarray) -> "NormStats":
        vecs = np.asarray(vectors, dtype=np.float64)
        return cls(vecs.mean(axis=0), vecs.std(axis=0))


def normalize(vector, stats: NormStats) -> np.ndarray:
    """z-score a descriptor (or already-flat vector) against corpus stats."""
    flat = vector.flatten() if isinstance(vector, DescriptorVector) else np.asarray(vector, dtype=np.float64)
    if flat.shape != stats.means.shape:
        raise DimensionMismatch(f"vector has shape {flat.shape}, stats expect {stats.means.shape}")
    safe = np.where(stats.constant, 1.0, stats.stds)
    return np.where(stats.constant, 0.0, (flat - stats.means) / safe)


@dataclass
class WeightProfile:
    w_measures: float = 1.0
    w_indexes: float = 1.0
    w_moments: float = 1.0
    overrides: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if min(self.w_measures, self.w_indexes, self.w_moments) < 0.0 or any(
            w < 0.0 for w in self.overrides.values()
        ):
            raise AllZeroWeights("weights must be nonnegative")

    def component_weights(self) -> np.ndarray:
        w = np.empty(DESCRIPTOR_DIM)
        w[GROUP_SLICES["measures"]] = self.w_measures
        w[GROUP_SLICES["indexes"]] = self.w_indexes
        w[GROUP_SLICES["moments"]] = self.w_moments
        for name, value in self.overrides.items():
            w[FLAT_COMPONENTS.index(name)] = value
        return w


def weighted_distance(a: np.ndarray, b: np.ndarray, w: WeightProfile) -> float:
    """sqrt of the weighted sum of per-group squared Euclidean distances."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.shape != (DESCRIPTOR_DIM,):
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    weights = w.component_weights()
    if not np.any(weights > 0.0):
        raise AllZeroWeights("all component weights are zero")
    diff = a - b
    return float(np.sqrt(np.sum(weights * diff * diff)))


@dataclass
class RankedResult:
    model_id: str
    distance: float
    predicted_class: str | None
    passed_filter: bool


@dataclass
class ModelRecord:
    model_id: str
    path: str
    class_name: str | None
    descriptor: DescriptorVector
    label: SemanticLabel


@dataclass
class RetrievalIndex:
    """Frozen corpus index: descriptors, labels, vocabularies, classifier,
    fact store and normalization stats.

    base_dir is runtime-only (never serialized): relative manifest paths are
    resolved against it, so an index that sits next to its corpus keeps
    working wherever the service is started from.
    """

    models: dict[str, ModelRecord]
    vocabularies: dict[str, ConceptVocabulary]
    classifier: Classifier
    store: FactStore
    stats: NormStats
    seed: int
    skipped: list[dict] = field(default_factory=list)
    schema_version: int = config.INDEX_SCHEMA_VERSION
    base_dir: Path | None = None

    def __post_init__(self):
        self._normalized: dict[str, np.ndarray] = {}

    def mesh_path(self, model_id: str) -> Path:
        path = Path(self.models[model_id].path)
        if not path.is_absolute() and self.base_dir is not None:
            return self.base_dir / path
        return path

    def model_ids(self) -> list[str]:
        return sorted(self.models)

    def normalized(self, model_id: str) -> np.ndarray:
        vec = self._normalized.get(model_id)
        if vec is None:
            vec = normalize(self.models[model_id].descriptor, self.stats)
            self._normalized[model_id] = vec
        return vec

    def class_members(self, class_name: str) -> set[str]:
        return {mid for mid, rec in self.models.items() if rec.class_name == class_name}


def retrieve(
    query: Mesh | str,
    index: RetrievalIndex,
    w: WeightProfile | None = None,
    k_results: int = config.DEFAULT_RESULT_COUNT,
    use_classifier: bool = True,
    use_ontology: bool = True,
    ontology_patterns=None,
) -> list[RankedResult]:
    """Three-stage retrieval: classify the query, filter the class members
    through the fact store, then rank by weighted descriptor distance.

    Surviving candidates claim result slots first; when they cannot fill
    k_results the nearest remaining corpus models top the list up, flagged
    passed_filter False. The final list is sorted by ascending distance (ties
    by model ID), so callers always see min(k_results, corpus) results in
    plain distance order with the stage trace on each entry.
    """
    if not index.models:
        raise EmptyIndex("index has no models")
    if k_results < 1:
        raise ValueError("k_results must be at least 1")
    w = w or WeightProfile()

    if isinstance(query, str):
        record = index.models.get(query)
        if record is None:
            raise UnknownModel(query)
        descriptor, label = record.descriptor, record.label
    else:
        analysis: ModelAnalysis = analyze_mesh(query)
        descriptor = analysis.descriptor
        label = label_model(descriptor.indexes, index.vocabularies)

    query_vec = normalize(descriptor, index.stats)

    predicted: str | None = None
    candidates = set(index.models)
    if use_classifier and index.classifier.size:
        features = index.classifier.features_from_indexes(descriptor.indexes)
        class_id = classify(features, index.classifier)
        if class_id < len(index.classifier.class_names):
            predicted = index.classifier.class_names[class_id]
            candidates = index.class_members(predicted)

    if use_ontology:
        patterns = ontology_patterns
        if patterns is None:
            patterns = [("?m", category, str(cid)) for category, cid in label.items()]
        if patterns:
            candidates = candidates & index.store.query(patterns)

    distances = {mid: weighted_distance(query_vec, index.normalized(mid), w) for mid in index.models}
    surviving = sorted(candidates, key=lambda m: (distances[m], m))
    backfill = sorted(set(index.models) - candidates, key=lambda m: (distances[m], m))

    # Survivors take every slot they can fill; backfill only tops the list up.
    # The returned list itself is presented in plain ascending-distance order.
    chosen = [(mid, True) for mid in surviving[:k_results]]
    chosen += [(mid, False) for mid in backfill[: max(0, k_results - len(chosen))]]
    chosen.sort(key=lambda item: (distances[item[0]], item[0]))
    return [RankedResult(mid, distances[mid], predicted, flag) for mid, flag in chosen]


def precision_recall(ranked: list[str], relevant: set[str]) -> list[tuple[float, float]]:
    """(recall, precision) after each rank of the result list."""
    if not relevant:
        raise EmptyRelevantSet("relevant set is empty")
    if len(set(ranked)) != len(ranked):
        raise ValueError("ranked list contains duplicates")
    points = []
    hits = 0
    for r, model_id in enumerate(ranked, start=1):
        if model_id in relevant:
            hits += 1
        points.append((hits / len(relevant), hits / r))
    return points


def interpolated_curve(points: list[tuple[float, float]], levels: np.ndarray) -> np.ndarray:
    """Precision at fixed recall levels: max precision at recall >= level."""
    recalls = np.array([p[0] for p in points])
    precisions = np.array([p[1] for p in points])
    out = np.zeros(len(levels))
    for i, level in enumerate(levels):
        mask = recalls >= level - 1e-12
        if mask.any():
            out[i] = precisions[mask].max()
    return out


@dataclass
class ClassMap:
    """Benchmark ground truth: class name -> model IDs, plus the hierarchy."""

    classes: dict[str, set[int]]
    parents: dict[str, str | None]

    def root_of(self, name: str) -> str:
        seen = set()
        while self.parents.get(name) and name not in seen:
            seen.add(name)
            name = self.parents[name]
        return name

    def rolled_up(self) -> "ClassMap":
        merged: dict[str, set[int]] = {}
        for name, ids in self.classes.items():
            merged.setdefault(self.root_of(name), set()).update(ids)
        return ClassMap(merged, {name: None for name in merged})


def parse_cla(text: str | bytes) -> ClassMap:
    """Read a PSB .cla classification file (version 1)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MalformedHeader("empty .cla file")
    header = lines[0].split()
    if len(header) != 2 or header[0] != "PSB" or header[1] != "1":
        raise MalformedHeader(f"unsupported .cla header: {lines[0]!r}")
    if len(lines) < 2:
        raise MalformedHeader("missing class/model counts")
    try:
        num_classes, num_models = (int(t) for t in lines[1].split())
    except ValueError:
        raise MalformedHeader(f"counts line unreadable: {lines[1]!r}") from None

    classes: dict[str, set[int]] = {}
    parents: dict[str, str | None] = {}
    pos = 2
    total_models = 0
    while pos < len(lines):
        fields = lines[pos].split()
        if len(fields) != 3:
            raise MalformedHeader(f"bad class line: {lines[pos]!r}")
        name, parent, count_str = fields
        try:
            count = int(count_str)
        except ValueError:
            raise MalformedHeader(f"bad class line: {lines[pos]!r}") from None
        pos += 1
        ids = set()
        for _ in range(count):
            if pos >= len(lines):
                raise CountMismatch(f"class {name!r} declares {count} models, file ended")
            try:
                ids.add(int(lines[pos]))
            except ValueError:
                raise CountMismatch(f"class {name!r}: {lines[pos]!r} is not a model ID") from None
            pos += 1
        classes[name] = ids
        parents[name] = None if parent == "0" else parent
        total_models += count

    if len(classes) != num_classes:
        raise CountMismatch(f"declared {num_classes} classes, parsed {len(classes)}")
    if total_models != num_models:
        raise CountMismatch(f"declared {num_models} models, parsed {total_models}")
    return ClassMap(classes, parents)


# --- persistence -----------------------------------------------------------

def _measures_to_dict(m) -> dict:
    return {
        "volume": m.volume,
        "surface_area": m.surface_area,
        "centroid": list(m.centroid),
        "principal_axes": [list(row) for row in m.principal_axes],
        "extents": list(m.extents),
        "diameter": m.diameter,
        "feret_extents": list(m.feret_extents),
        "small_radius": m.small_radius,
        "large_radius": m.large_radius,
        "esd_paper": m.esd_paper,
        "esd_volume": m.esd_volume,
        "volume_source": m.volume_source,
    }


def _measures_from_dict(d) -> "Measures":
    from .mesh import Measures

    return Measures(
        volume=d["volume"],
        surface_area=d["surface_area"],
        centroid=np.array(d["centroid"]),
        principal_axes=np.array(d["principal_axes"]),
        extents=np.array(d["extents"]),
        diameter=d["diameter"],
        feret_extents=np.array(d["feret_extents"]),
        small_radius=d["small_radius"],
        large_radius=d["large_radius"],
        esd_paper=d["esd_paper"],
        esd_volume=d["esd_volume"],
        volume_source=d["volume_source"],
    )


def _descriptor_to_dict(d: DescriptorVector) -> dict:
    from .descriptors import INDEX_COMPONENTS

    return {
        "measures": _measures_to_dict(d.measures),
        "indexes": {n: getattr(d.indexes, n) for n in INDEX_COMPONENTS},
        "moments": list(d.moments.as_array()),
        "tetra_ratios": list(d.tetra_ratios),
    }


def _descriptor_from_dict(d) -> DescriptorVector:
    from .descriptors import MomentVector, ShapeIndexVector

    return DescriptorVector(
        measures=_measures_from_dict(d["measures"]),
        indexes=ShapeIndexVector(**d["indexes"]),
        moments=MomentVector(np.array(d["moments"])),
        tetra_ratios=(d["tetra_ratios"][0], d["tetra_ratios"][1]),
    )


def index_to_json(index: RetrievalIndex) -> str:
    clf = index.classifier
    doc = {
        "schema_version": index.schema_version,
        "seed": index.seed,
        "models": {
            mid: {
                "path": rec.path,
                "class": rec.class_name,
                "descriptor": _descriptor_to_dict(rec.descriptor),
                "label": dict(rec.label.items()),
            }
            for mid, rec in index.models.items()
        },
        "vocabularies": {
            cat: {"centers": list(v.centers), "labels": list(v.labels)}
            for cat, v in index.vocabularies.items()
        },
        "classifier": {
            "features": [list(row) for row in clf.features],
            "class_ids": [int(c) for c in clf.class_ids],
            "k": clf.k,
            "feature_names": list(clf.feature_names),
            "means": list(clf.means),
            "stds": list(clf.stds),
            "class_names": list(clf.class_names),
        },
        "facts": index.store.to_list(),
        "norm_stats": {"means": list(index.stats.means), "stds": list(index.stats.stds)},
        "skipped": index.skipped,
    }
    return json.dumps(doc, sort_keys=True, indent=1)


def index_from_json(text: str) -> RetrievalIndex:
    doc = json.loads(text)
    models = {
        mid: ModelRecord(
            model_id=mid,
            path=entry["path"],
            class_name=entry["class"],
            descriptor=_descriptor_from_dict(entry["descriptor"]),
            label=SemanticLabel({k: int(v) for k, v in entry["label"].items()}),
        )
        for mid, entry in doc["models"].items()
    }
    vocabularies = {
        cat: ConceptVocabulary(cat, np.array(v["centers"]), tuple(v["labels"]))
        for cat, v in doc["vocabularies"].items()
    }
    c = doc["classifier"]
    n_features = len(c["feature_names"])
    classifier = Classifier(
        features=np.array(c["features"]).reshape(-1, n_features),
        class_ids=np.array(c["class_ids"], dtype=np.int64),
        k=c["k"],
        feature_names=tuple(c["feature_names"]),
        means=np.array(c["means"]),
        stds=np.array(c["stds"]),
        class_names=tuple(c["class_names"]),
    )
    store = FactStore(categories=tuple(sorted(doc["vocabularies"])))
    for s, p, o in doc["facts"]:
        store._add(Fact(s, p, o))
    for mid in models:
        store._models.add(mid)
    store.freeze()
    return RetrievalIndex(
        models=models,
        vocabularies=vocabularies,
        classifier=classifier,
        store=store,
        stats=NormStats(np.array(doc["norm_stats"]["means"]), np.array(doc["norm_stats"]["stds"])),
        seed=doc["seed"],
        skipped=doc.get("skipped", []),
        schema_version=doc["schema_version"],
    )


def save_index(index: RetrievalIndex, path: str | Path):
    Path(path).write_text(index_to_json(index), encoding="utf-8")


def load_index(path: str | Path) -> RetrievalIndex:
    index = index_from_json(Path(path).read_text(encoding="utf-8"))
    index.base_dir = Path(path).resolve().parent
    return index


# --- evaluation & canonical result encoding ---------------------------------

RECALL_LEVELS = np.linspace(0.05, 1.0, 20)


def evaluate_pr(
    index: RetrievalIndex,
    class_name: str | None = None,
    w: WeightProfile | None = None,
    use_classifier: bool = True,
    use_ontology: bool = True,
    levels: np.ndarray = RECALL_LEVELS,
) -> list[tuple[float, float]]:
    """Mean interpolated precision-recall curve over query models.

    Each indexed model of the requested class (every classed model when
    class_name is None) queries the corpus; itself is excluded from both the
    ranking and the relevant set.
    """
    queries = [
        mid
        for mid, rec in sorted(index.models.items())
        if rec.class_name is not None
        and (class_name is None or rec.class_name == class_name)
    ]
    curves = []
    for qid in queries:
        relevant = index.class_members(index.models[qid].class_name) - {qid}
        if not relevant:
            continue
        ranked = [
            r.model_id
            for r in retrieve(
                qid,
                index,
                w,
                k_results=len(index.models),
                use_classifier=use_classifier,
                use_ontology=use_ontology,
            )
            if r.model_id != qid
        ]
        curves.append(interpolated_curve(precision_recall(ranked, relevant), levels))
    if not curves:
        raise EmptyRelevantSet(f"no evaluable queries for class {class_name!r}")
    mean = np.mean(curves, axis=0)
    return list(zip((float(x) for x in levels), (float(p) for p in mean)))


def mean_precision_at(
    index: RetrievalIndex,
    rank: int,
    w: WeightProfile | None = None,
    use_classifier: bool = True,
    use_ontology: bool = True,
) -> float:
    """Mean precision among the top `rank` results, self excluded, over all
    classed query models."""
    scores = []
    for qid, rec in sorted(index.models.items()):
        if rec.class_name is None:
            continue
        relevant = index.class_members(rec.class_name) - {qid}
        if not relevant:
            continue
        ranked = [
            r.model_id
            for r in retrieve(
                qid,
                index,
                w,
                k_results=rank + 1,
                use_classifier=use_classifier,
                use_ontology=use_ontology,
            )
            if r.model_id != qid
        ][:rank]
        scores.append(sum(1 for m in ranked if m in relevant) / rank)
    if not scores:
        raise EmptyRelevantSet("no evaluable queries")
    return float(np.mean(scores))


def results_to_json(results: list[RankedResult]) -> str:
    """Canonical JSON for a result list; the CLI and the HTTP service both
    emit exactly this string so their outputs are byte-identical."""
    payload = {
        "results": [
            {
                "model_id": r.model_id,
                "distance": r.distance,
                "predicted_class": r.predicted_class,
                "passed_filter": r.passed_filter,
            }
            for r in results
        ]
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def pr_to_csv(curve: list[tuple[float, float]]) -> str:
    lines = ["recall,precision"]
    lines += [f"{r:.6g},{p:.6g}" for r, p in curve]
    return "\n".join(lines) + "\n"

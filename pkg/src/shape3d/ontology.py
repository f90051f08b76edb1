"""Minimal fact store standing in for the OWL/SPARQL layer.

Facts are (subject, predicate, object) string triples holding each model's
semantic concepts, quantized landmark-polygon ratios and qualitative spatial
relations between model-scoped geometric entities. Conjunctive patterns with
variables answer the "which models look like this" question that candidate
filtering needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import config
from .errors import DegenerateEntity, DuplicateModel, UnknownPredicate
from .descriptors import Landmarks
from .mesh import Measures
from .semantics import SemanticLabel


class Fact(NamedTuple):
    subject: str
    predicate: str
    object: str


# Topological relation names, by entity-pair kind:
#   point-point: Overlap / Adjacent      point-line: On / Adjacent
#   line-line:   Cross / NotCross        line-plane: Contained / Adjacent
RELATION_PREDICATES = ("Overlap", "Adjacent", "On", "Cross", "NotCross", "Contained")
_SYMMETRIC = {"Overlap", "Adjacent", "Cross", "NotCross"}

RATIO_PREDICATES = ("volume_ratio", "area_ratio")


@dataclass
class SpatialEntities:
    """Named geometric entities of one model, in its own frame.

    Lines are segments (a, b); planes are (origin, unit normal). scale is the
    model's equivalent-sphere diameter and normalizes relation thresholds.
    """

    points: dict[str, np.ndarray]
    lines: dict[str, tuple[np.ndarray, np.ndarray]]
    planes: dict[str, tuple[np.ndarray, np.ndarray]]
    scale: float


def spatial_entities(
    landmarks: Landmarks, axes: np.ndarray, extents: np.ndarray, measures: Measures
) -> SpatialEntities:
    """Points P1..P4, the three principal-axis segments plus the P1P3 segment,
    and the two reference planes."""
    scale = measures.esd_volume
    points = {
        "P1": landmarks.p1,
        "P2": landmarks.p2,
        "P3": landmarks.p3,
        "P4": landmarks.p4,
    }
    center = measures.centroid
    lines: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for i in range(3):
        if extents[i] <= 1e-12 * scale:
            raise DegenerateEntity(f"principal axis {i + 1} has zero length")
        half = axes[i] * (extents[i] / 2.0)
        lines[f"axis{i + 1}"] = (center - half, center + half)
    lines["segP1P3"] = (landmarks.p1, landmarks.p3)

    planes: dict[str, tuple[np.ndarray, np.ndarray]] = {"plan": (center, axes[2])}
    n = np.cross(landmarks.p3 - landmarks.p2, landmarks.p4 - landmarks.p2)
    norm = float(np.linalg.norm(n))
    if norm > 1e-12 * scale * scale:
        planes["planeP2P3P4"] = (landmarks.p2, n / norm)

    return SpatialEntities(points=points, lines=lines, planes=planes, scale=scale)


def _point_segment_distance(p, a, b) -> float:
    d = b - a
    denom = float(np.dot(d, d))
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    t = min(1.0, max(0.0, float(np.dot(p - a, d)) / denom))
    return float(np.linalg.norm(p - (a + t * d)))


def _segment_segment_distance(p1, q1, p2, q2) -> float:
    """Closest distance between segments [p1,q1] and [p2,q2] (clamped
    quadratic minimization, Eberly's formulation)."""
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = float(np.dot(d1, d1))
    e = float(np.dot(d2, d2))
    f = float(np.dot(d2, r))
    if a == 0.0 and e == 0.0:
        return float(np.linalg.norm(r))
    if a == 0.0:
        t = min(1.0, max(0.0, f / e))
        return float(np.linalg.norm(r - t * d2))
    c = float(np.dot(d1, r))
    if e == 0.0:
        s = min(1.0, max(0.0, -c / a))
        return float(np.linalg.norm(r + s * d1))
    b = float(np.dot(d1, d2))
    denom = a * e - b * b
    s = min(1.0, max(0.0, (b * f - c * e) / denom)) if denom > 0.0 else 0.0
    t = (b * s + f) / e
    if t < 0.0:
        t = 0.0
        s = min(1.0, max(0.0, -c / a))
    elif t > 1.0:
        t = 1.0
        s = min(1.0, max(0.0, (b - c) / a))
    return float(np.linalg.norm((p1 + s * d1) - (p2 + t * d2)))


def _plane_distance(p, plane) -> float:
    origin, normal = plane
    return abs(float(np.dot(p - origin, normal)))


def qualitative_relations(
    entities: SpatialEntities, eps_rel: float = config.EPSILON_REL_DEFAULT
) -> list[Fact]:
    """Emit Table-style topological facts with threshold tau = eps_rel * scale.

    Within tau counts as touching (Overlap / On / Cross / Contained), within
    2*tau as Adjacent; line pairs always get Cross or NotCross; anything else
    emits nothing. Symmetric relations are emitted in both directions.
    """
    if not 0.0 < eps_rel < 0.5:
        raise ValueError("eps_rel must lie in (0, 0.5)")
    tau = eps_rel * entities.scale
    facts: list[Fact] = []

    def emit(a: str, rel: str, b: str):
        facts.append(Fact(a, rel, b))
        if rel in _SYMMETRIC:
            facts.append(Fact(b, rel, a))

    point_items = list(entities.points.items())
    line_items = list(entities.lines.items())
    plane_items = list(entities.planes.items())

    for i, (na, pa) in enumerate(point_items):
        for nb, pb in point_items[i + 1 :]:
            d = float(np.linalg.norm(pa - pb))
            if d < tau:
                emit(na, "Overlap", nb)
            elif d < 2.0 * tau:
                emit(na, "Adjacent", nb)

    for np_, p in point_items:
        for nl, (a, b) in line_items:
            d = _point_segment_distance(p, a, b)
            if d < tau:
                emit(np_, "On", nl)
            elif d < 2.0 * tau:
                emit(np_, "Adjacent", nl)

    for i, (na, (a1, b1)) in enumerate(line_items):
        for nb, (a2, b2) in line_items[i + 1 :]:
            d = _segment_segment_distance(a1, b1, a2, b2)
            emit(na, "Cross" if d < tau else "NotCross", nb)

    for nl, (a, b) in line_items:
        for npl, plane in plane_items:
            da = _plane_distance(a, plane)
            db = _plane_distance(b, plane)
            if da < tau and db < tau:
                emit(nl, "Contained", npl)
            else:
                origin, normal = plane
                sa = float(np.dot(a - origin, normal))
                sb = float(np.dot(b - origin, normal))
                nearest = 0.0 if sa * sb < 0.0 else min(da, db)
                if nearest < 2.0 * tau:
                    emit(nl, "Adjacent", npl)

    return facts


def ratio_bucket(value: float) -> str:
    """Decile token q0..q9 for a ratio in [0, 1]."""
    return f"q{min(9, max(0, int(math.floor(value * 10.0))))}"


@dataclass
class FactStore:
    categories: tuple[str, ...] = ()
    facts: set[Fact] = field(default_factory=set)

    def __post_init__(self):
        self._by_subject: dict[str, set[Fact]] = {}
        self._by_predicate: dict[str, set[Fact]] = {}
        self._by_object: dict[str, set[Fact]] = {}
        self._models: set[str] = set()
        self._frozen = False
        self.predicates: set[str] = (
            set(RELATION_PREDICATES)
            | set(RATIO_PREDICATES)
            | set(self.categories)
            | {"volume_source"}
        )
        existing, self.facts = self.facts, set()
        for fact in existing:
            self._add(fact)

    @property
    def models(self) -> frozenset[str]:
        return frozenset(self._models)

    def freeze(self):
        self._frozen = True

    def _add(self, fact: Fact):
        if fact.predicate not in self.predicates:
            raise UnknownPredicate(fact.predicate)
        if fact in self.facts:
            return
        self.facts.add(fact)
        self._by_subject.setdefault(fact.subject, set()).add(fact)
        self._by_predicate.setdefault(fact.predicate, set()).add(fact)
        self._by_object.setdefault(fact.object, set()).add(fact)

    def assert_model(
        self,
        model_id: str,
        label: SemanticLabel,
        relations: list[Fact],
        tetra_ratios: tuple[float, float],
        measures: Measures,
    ):
        """Add one model's concept, relation and ratio facts."""
        if self._frozen:
            raise ValueError("fact store is frozen")
        if model_id in self._models:
            raise DuplicateModel(model_id)
        self._models.add(model_id)
        for category, concept_id in label.items():
            self._add(Fact(model_id, category, str(concept_id)))
        for fact in relations:
            self._add(
                Fact(f"{model_id}/{fact.subject}", fact.predicate, f"{model_id}/{fact.object}")
            )
        self._add(Fact(model_id, "volume_ratio", ratio_bucket(tetra_ratios[0])))
        self._add(Fact(model_id, "area_ratio", ratio_bucket(tetra_ratios[1])))
        self._add(Fact(model_id, "volume_source", measures.volume_source))

    # --- pattern matching -------------------------------------------------

    def _candidates(self, pattern, bindings) -> set[Fact]:
        s, p, o = (_resolve(term, bindings) for term in pattern)
        pools = []
        if s is not None:
            pools.append(self._by_subject.get(s, set()))
        if p is not None:
            pools.append(self._by_predicate.get(p, set()))
        if o is not None:
            pools.append(self._by_object.get(o, set()))
        if not pools:
            return self.facts
        return set.intersection(*sorted(pools, key=len))

    def query(self, patterns) -> set[str]:
        """Model IDs admitting a consistent variable assignment for every
        pattern. Variables are "?name" tokens, optionally entity-scoped as
        "?name/entity"; the first variable seen in a subject position is the
        one reported. An empty pattern list matches every asserted model."""
        pats = [tuple(p) for p in patterns]
        for _, pred, _ in pats:
            if _parse(pred)[0] == "const" and pred not in self.predicates:
                raise UnknownPredicate(pred)
        if not pats:
            return set(self._models)

        model_var = None
        for s, _, _ in pats:
            kind, name, _ = _parse(s)
            if kind == "var":
                model_var = name
                break
        if model_var is None:
            for _, _, o in pats:
                kind, name, _ = _parse(o)
                if kind == "var":
                    model_var = name
                    break
        if model_var is None:
            # Fully ground conjunction: every model matches iff all facts hold.
            ok = all(Fact(*p) in self.facts for p in pats)
            return set(self._models) if ok else set()

        ordered = sorted(pats, key=lambda p: len(self._candidates(p, {})))
        results: set[str] = set()
        self._join(ordered, 0, {}, model_var, results)
        return results

    def _join(self, pats, depth, bindings, model_var, out: set[str]):
        if depth == len(pats):
            if model_var in bindings:
                out.add(bindings[model_var])
            return
        pattern = pats[depth]
        for fact in self._candidates(pattern, bindings):
            new = _unify(pattern, fact, bindings)
            if new is not None:
                self._join(pats, depth + 1, new, model_var, out)

    def export(self) -> str:
        """One fact per line, whitespace-separated, sorted."""
        lines = [f"{s} {p} {o}" for s, p, o in sorted(self.facts)]
        return "\n".join(lines) + ("\n" if lines else "")

    def to_list(self) -> list[list[str]]:
        return [list(f) for f in sorted(self.facts)]


def _parse(term: str):
    """-> ("var", name, suffix) or ("const", value, None)."""
    if isinstance(term, str) and term.startswith("?"):
        if "/" in term:
            name, suffix = term.split("/", 1)
            return "var", name, suffix
        return "var", term, None
    return "const", term, None


def _resolve(term, bindings):
    """Concrete value of a pattern term under bindings, None when still free."""
    kind, name, suffix = _parse(term)
    if kind == "const":
        return name
    if name in bindings:
        return bindings[name] if suffix is None else f"{bindings[name]}/{suffix}"
    return None


def _match_term(term, value: str, bindings):
    kind, name, suffix = _parse(term)
    if kind == "const":
        return bindings if value == name else None
    if suffix is not None:
        tail = f"/{suffix}"
        if not value.endswith(tail):
            return None
        value = value[: -len(tail)]
    if name in bindings:
        return bindings if bindings[name] == value else None
    new = dict(bindings)
    new[name] = value
    return new


def _unify(pattern, fact: Fact, bindings):
    b = bindings
    for term, value in zip(pattern, fact):
        b = _match_term(term, value, b)
        if b is None:
            return None
    return b

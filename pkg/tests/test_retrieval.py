import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shape3d import load_index, parse_cla, precision_recall, retrieve
from shape3d.descriptors import DESCRIPTOR_DIM, FLAT_COMPONENTS, GROUP_SLICES
from shape3d.errors import (
    AllZeroWeights,
    CountMismatch,
    DimensionMismatch,
    EmptyIndex,
    EmptyRelevantSet,
    MalformedHeader,
    UnknownModel,
)
from shape3d.indexing import Config, build_index
from shape3d.retrieval import (
    NormStats,
    RetrievalIndex,
    WeightProfile,
    normalize,
    weighted_distance,
)
from shape3d.semantics import Classifier

from conftest import sphere_box_meshes, write_corpus


@pytest.fixture(scope="module")
def small_index(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("corpus")
    write_corpus(tmp, sphere_box_meshes(6, 6))
    index, _ = build_index(Config(corpus_dir=tmp, index_path=tmp / "idx.json", seed=3))
    return index


class TestNormalize:
    def test_corpus_mean_maps_to_zero(self):
        vecs = np.random.default_rng(0).normal(size=(5, DESCRIPTOR_DIM))
        stats = NormStats.from_vectors(vecs)
        assert np.allclose(normalize(vecs.mean(axis=0), stats), 0.0, atol=1e-12)

    def test_single_model_corpus_all_zero(self):
        vec = np.random.default_rng(1).normal(size=DESCRIPTOR_DIM)
        stats = NormStats.from_vectors(vec[None, :])
        assert np.array_equal(normalize(vec, stats), np.zeros(DESCRIPTOR_DIM))

    def test_two_model_corpus_opposite_signs(self):
        rng = np.random.default_rng(2)
        a, b = rng.normal(size=(2, DESCRIPTOR_DIM))
        stats = NormStats.from_vectors(np.stack([a, b]))
        za, zb = normalize(a, stats), normalize(b, stats)
        changing = ~stats.constant
        assert np.allclose(za[changing], -zb[changing], atol=1e-9)
        assert np.allclose(np.abs(za[changing]), 1.0, atol=1e-9)

    def test_dimension_mismatch(self):
        stats = NormStats.from_vectors(np.zeros((2, DESCRIPTOR_DIM)))
        with pytest.raises(DimensionMismatch):
            normalize(np.zeros(5), stats)


class TestWeightedDistance:
    def test_zero_for_equal(self):
        v = np.random.default_rng(3).normal(size=DESCRIPTOR_DIM)
        assert weighted_distance(v, v, WeightProfile()) == 0.0

    def test_three_four_five(self):
        a = np.zeros(DESCRIPTOR_DIM)
        b = np.zeros(DESCRIPTOR_DIM)
        b[GROUP_SLICES["indexes"].start] = 3.0
        b[GROUP_SLICES["indexes"].start + 1] = 4.0
        assert weighted_distance(a, b, WeightProfile()) == pytest.approx(5.0)

    def test_doubled_weights_scale_by_sqrt2(self):
        rng = np.random.default_rng(4)
        a, b = rng.normal(size=(2, DESCRIPTOR_DIM))
        d1 = weighted_distance(a, b, WeightProfile(1, 1, 1))
        d2 = weighted_distance(a, b, WeightProfile(2, 2, 2))
        assert d2 == pytest.approx(d1 * np.sqrt(2.0), rel=1e-12)

    def test_component_override(self):
        a = np.zeros(DESCRIPTOR_DIM)
        b = np.zeros(DESCRIPTOR_DIM)
        i = FLAT_COMPONENTS.index("volume")
        b[i] = 2.0
        w = WeightProfile(overrides={"volume": 0.25})
        assert weighted_distance(a, b, w) == pytest.approx(1.0)

    def test_all_zero_weights(self):
        v = np.zeros(DESCRIPTOR_DIM)
        with pytest.raises(AllZeroWeights):
            weighted_distance(v, v, WeightProfile(0, 0, 0))

    def test_negative_weight_rejected(self):
        with pytest.raises(AllZeroWeights):
            WeightProfile(-1.0, 1.0, 1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            weighted_distance(np.zeros(3), np.zeros(3), WeightProfile())


class TestRetrieve:
    def test_self_retrieval(self, small_index):
        for mid in small_index.model_ids():
            top = retrieve(mid, small_index, k_results=1)[0]
            assert top.model_id == mid
            assert top.distance < 1e-9

    def test_holdout_sphere_finds_spheres(self, small_index):
        from shape3d import primitives as prim

        query = prim.perturbed(prim.icosphere(1), 0.05, seed=777)
        for flags in ((True, True), (False, False)):
            results = retrieve(
                query, small_index, k_results=5,
                use_classifier=flags[0], use_ontology=flags[1],
            )
            assert all(r.model_id.startswith("sphere") for r in results)

    def test_k_clamped_to_corpus(self, small_index):
        assert len(retrieve("sphere_00", small_index, k_results=50)) == 12

    def test_unknown_model(self, small_index):
        with pytest.raises(UnknownModel):
            retrieve("nope", small_index)

    def test_empty_index(self, small_index):
        import dataclasses

        empty = dataclasses.replace(small_index, models={})
        with pytest.raises(EmptyIndex):
            retrieve("sphere_00", empty)

    def test_weight_scaling_keeps_order(self, small_index):
        a = retrieve("boxy_01", small_index, WeightProfile(1, 1, 1), k_results=12)
        b = retrieve("boxy_01", small_index, WeightProfile(3, 3, 3), k_results=12)
        assert [r.model_id for r in a] == [r.model_id for r in b]

    def test_filter_monotone_and_order_preserving(self, small_index):
        unfiltered = retrieve(
            "sphere_02", small_index, k_results=12,
            use_classifier=False, use_ontology=False,
        )
        filtered = retrieve(
            "sphere_02", small_index, k_results=12,
            use_classifier=True, use_ontology=True,
        )
        survivors = [r.model_id for r in filtered if r.passed_filter]
        assert set(survivors) <= {r.model_id for r in unfiltered}
        base_order = [r.model_id for r in unfiltered if r.model_id in set(survivors)]
        assert base_order == survivors

    def test_explicit_patterns(self, small_index):
        sphere_label = small_index.models["sphere_00"].label
        cid = sphere_label.concepts["sphericity"]
        results = retrieve(
            "sphere_00", small_index, k_results=12, use_classifier=False,
            ontology_patterns=[("?m", "sphericity", str(cid))],
        )
        in_filter = {r.model_id for r in results if r.passed_filter}
        assert in_filter == small_index.store.query([("?m", "sphericity", str(cid))])

    def test_determinism(self, small_index):
        a = retrieve("sphere_03", small_index, k_results=12)
        b = retrieve("sphere_03", small_index, k_results=12)
        assert [(r.model_id, r.distance) for r in a] == [(r.model_id, r.distance) for r in b]

    def test_results_sorted_by_distance_even_with_backfill(self, small_index):
        results = retrieve("sphere_00", small_index, k_results=12)
        dists = [r.distance for r in results]
        assert dists == sorted(dists)
        assert any(not r.passed_filter for r in results)  # backfill present

    def test_backfill_only_tops_up(self, small_index):
        # every surviving candidate must appear before any backfill is taken
        full = retrieve("sphere_00", small_index, k_results=12)
        survivors = {r.model_id for r in full if r.passed_filter}
        for k in range(1, 13):
            got = retrieve("sphere_00", small_index, k_results=k)
            got_survivors = {r.model_id for r in got if r.passed_filter}
            assert len(got_survivors) == min(k, len(survivors))


class TestPrecisionRecall:
    def test_all_relevant_first(self):
        pts = precision_recall(["a", "b", "c"], {"a", "b", "c"})
        assert all(p == 1.0 for _, p in pts)
        assert pts[-1] == (1.0, 1.0)

    def test_single_relevant_at_rank_one(self):
        assert precision_recall(["a"], {"a"}) == [(1.0, 1.0)]

    def test_hand_computed_curve(self):
        pts = precision_recall(["r1", "n", "r2"], {"r1", "r2"})
        assert pts == [(0.5, 1.0), (0.5, 0.5), (1.0, pytest.approx(2.0 / 3.0))]

    def test_empty_relevant_set(self):
        with pytest.raises(EmptyRelevantSet):
            precision_recall(["a"], set())

    def test_duplicate_ranked_rejected(self):
        with pytest.raises(ValueError):
            precision_recall(["a", "a"], {"a"})

    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_properties_and_brute_force_recount(self, data):
        n = data.draw(st.integers(1, 30))
        ranked = [f"m{i}" for i in range(n)]
        relevant = set(
            data.draw(st.lists(st.sampled_from(ranked), min_size=1, unique=True))
        )
        pts = precision_recall(ranked, relevant)
        recalls = [r for r, _ in pts]
        assert recalls == sorted(recalls)
        for r, (rec, prec) in enumerate(pts, start=1):
            hits = sum(1 for m in ranked[:r] if m in relevant)
            assert abs(rec - hits / len(relevant)) < 1e-12
            assert abs(prec - hits / r) < 1e-12
            assert 0.0 <= rec <= 1.0 and 0.0 <= prec <= 1.0


class TestParseCla:
    def test_minimal_example(self):
        cm = parse_cla("PSB 1\n1 2\nsphere 0 2\n12\n15\n")
        assert cm.classes == {"sphere": {12, 15}}
        assert cm.parents == {"sphere": None}

    def test_unsupported_version(self):
        with pytest.raises(MalformedHeader):
            parse_cla("PSB 2\n1 1\nsphere 0 1\n3\n")

    def test_count_mismatch(self):
        with pytest.raises(CountMismatch):
            parse_cla("PSB 1\n1 2\nsphere 0 1\n12\n")

    def test_hierarchy_and_rollup(self):
        text = (
            "PSB 1\n3 4\n"
            "vehicle 0 0\n"
            "car vehicle 2\n1\n2\n"
            "plane vehicle 2\n3\n4\n"
        )
        cm = parse_cla(text)
        assert cm.parents["car"] == "vehicle"
        assert cm.root_of("car") == "vehicle"
        rolled = cm.rolled_up()
        assert rolled.classes == {"vehicle": {1, 2, 3, 4}}

    def test_empty_file(self):
        with pytest.raises(MalformedHeader):
            parse_cla("")


class TestPersistence:
    def test_roundtrip_preserves_results(self, small_index, tmp_path):
        from shape3d import save_index

        path = tmp_path / "rt.json"
        save_index(small_index, path)
        loaded = load_index(path)
        a = retrieve("sphere_01", small_index, k_results=12)
        b = retrieve("sphere_01", loaded, k_results=12)
        assert [(r.model_id, r.distance) for r in a] == [(r.model_id, r.distance) for r in b]

    def test_same_seed_builds_are_byte_identical(self, tmp_path):
        corpus = write_corpus(tmp_path / "c", sphere_box_meshes(4, 4))
        build_index(Config(corpus_dir=corpus, index_path=tmp_path / "a.json", seed=9))
        build_index(Config(corpus_dir=corpus, index_path=tmp_path / "b.json", seed=9))
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

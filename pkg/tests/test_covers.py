import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrcolor import (
    Cover,
    DomainError,
    MalformedInputError,
    build_graph,
    cover_from_json_dict,
    cover_from_permutations,
    cover_to_json_dict,
    gen_cycle,
    lift_from_lists,
    make_cover,
    random_cover,
    shifted_cycle_cover,
    solve_exact,
    validate_cover,
)

from .conftest import brute_force_colorings, random_graph


class TestLift:
    def test_equal_lists_identity_matchings(self, c4_equal_lift):
        g, cover = c4_equal_lift
        for pairs in cover.matchings.values():
            assert len(pairs) == 2
        assert validate_cover(g, cover) == []

    def test_disjoint_labels_empty_matching(self):
        g = build_graph(2, [(0, 1)])
        cover = lift_from_lists(g, [[1, 2], [3, 4]])
        assert cover.matchings[(0, 1)] == ()

    def test_partial_overlap(self):
        g = build_graph(2, [(0, 1)])
        cover = lift_from_lists(g, [[1, 2], [2, 3]])
        assert len(cover.matchings[(0, 1)]) == 1

    def test_empty_list_rejected(self):
        g = build_graph(2, [(0, 1)])
        with pytest.raises(DomainError, match="nonempty"):
            lift_from_lists(g, [[1], []])

    def test_lists_are_vertex_blocks(self):
        g = gen_cycle(3)
        cover = lift_from_lists(g, [[5, 7], [1], [2, 4, 9]])
        assert cover.lists == ((0, 1), (2,), (3, 4, 5))


class TestValidate:
    def test_random_cover_valid_all_modes(self):
        g = random_graph(4, 9, 0.4)
        for seed in range(5):
            assert validate_cover(g, random_cover(g, 3, seed)) == []
            assert validate_cover(g, random_cover(g, 3, seed, mode="bernoulli", q=0.4)) == []

    def test_matching_condition_violated(self):
        g = build_graph(2, [(0, 1)])
        bad = make_cover([[0, 1], [2, 3]], {(0, 1): [(0, 2), (0, 3)]})
        problems = validate_cover(g, bad)
        assert any("matching condition" in p for p in problems)

    def test_pair_on_non_edge(self):
        g = build_graph(3, [(0, 1)])
        bad = make_cover([[0], [1], [2]], {(0, 2): [(0, 2)]})
        problems = validate_cover(g, bad)
        assert any("not an edge" in p for p in problems)

    def test_non_disjoint_lists(self):
        g = build_graph(2, [(0, 1)])
        bad = make_cover([[0, 1], [1, 2]], {(0, 1): []})
        problems = validate_cover(g, bad)
        assert any("not disjoint" in p for p in problems)

    def test_pair_leaving_lists(self):
        g = build_graph(2, [(0, 1)])
        bad = make_cover([[0], [1]], {(0, 1): [(0, 5)]})
        problems = validate_cover(g, bad)
        assert any("leaves the endpoint lists" in p for p in problems)

    def test_wrong_vertex_count(self):
        g = build_graph(3, [])
        bad = make_cover([[0]], {})
        assert validate_cover(g, bad)


class TestRandomCover:
    def test_perfect_has_k_pairs_per_edge(self):
        g = gen_cycle(5)
        cover = random_cover(g, 4, seed=0)
        for pairs in cover.matchings.values():
            assert len(pairs) == 4

    def test_perfect_mode_every_color_matched_once_per_edge(self):
        g = gen_cycle(5)
        cover = random_cover(g, 3, seed=1)
        for (u, v), pairs in cover.matchings.items():
            assert sorted(x for x, _ in pairs) == list(cover.lists[u])
            assert sorted(y for _, y in pairs) == list(cover.lists[v])

    def test_k1_single_edge_forces_conflict(self, single_edge_cover=None):
        g = build_graph(2, [(0, 1)])
        cover = random_cover(g, 1, seed=3)
        assert cover.matchings[(0, 1)] == ((0, 1),)
        assert solve_exact(g, cover) is None

    def test_k1_edgeless_colorable(self):
        g = build_graph(3, [])
        cover = random_cover(g, 1, seed=3)
        assert solve_exact(g, cover) is not None

    def test_bernoulli_subset_of_perfect(self):
        g = gen_cycle(6)
        cover = random_cover(g, 3, seed=5, mode="bernoulli", q=0.5)
        for pairs in cover.matchings.values():
            assert len(pairs) <= 3
        assert validate_cover(g, cover) == []

    def test_bad_mode_and_q(self):
        g = gen_cycle(4)
        with pytest.raises(DomainError):
            random_cover(g, 2, 0, mode="nope")
        with pytest.raises(DomainError):
            random_cover(g, 2, 0, mode="bernoulli", q=1.5)
        with pytest.raises(DomainError):
            random_cover(g, 0, 0)

    def test_deterministic(self):
        g = gen_cycle(6)
        assert random_cover(g, 3, seed=8) == random_cover(g, 3, seed=8)

    def test_color_neighbor_degree_bounded_by_graph_degree(self):
        g = random_graph(6, 8, 0.5)
        cover = random_cover(g, 3, seed=2)
        for x in range(cover.n_colors):
            owner = int(cover.owner[x])
            assert len(cover.color_neighbors[x]) <= g.degree(owner)

    def test_uniformity_chi_squared(self):
        # 2 matchings per edge on the 4-cycle: 16 equally likely covers.
        from scipy.stats import chisquare

        g = gen_cycle(4)
        counts = {}
        samples = 100_000
        for i in range(samples):
            cover = random_cover(g, 2, seed=i)
            sig = []
            for u, v in g.edges:
                pairs = cover.matchings[(u, v)]
                sig.append(1 if (2 * u, 2 * v) in pairs else 0)
            key = tuple(sig)
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 16
        stat = chisquare(list(counts.values()))
        assert stat.pvalue > 1e-4


class TestShiftedCycle:
    @pytest.mark.parametrize("m", [4, 6])
    def test_not_colorable(self, m):
        cover = shifted_cycle_cover(m)
        g = gen_cycle(m)
        assert validate_cover(g, cover) == []
        assert brute_force_colorings(g, cover) == []
        assert solve_exact(g, cover) is None

    def test_identity_variant_colorable(self):
        g = gen_cycle(4)
        cover = cover_from_permutations(g, 2, {})
        assert solve_exact(g, cover) is not None

    def test_odd_length_rejected(self):
        with pytest.raises(DomainError, match="even"):
            shifted_cycle_cover(5)

    def test_bad_permutation_rejected(self):
        g = gen_cycle(4)
        with pytest.raises(DomainError, match="permutation"):
            cover_from_permutations(g, 2, {(0, 1): (0, 0)})


class TestSerialization:
    def test_round_trip(self):
        g = random_graph(9, 7, 0.5)
        cover = random_cover(g, 3, seed=4)
        doc = cover_to_json_dict(cover)
        again = cover_from_json_dict(json.loads(json.dumps(doc)))
        assert again == cover

    def test_k_per_vertex_mismatch(self):
        doc = {"k_per_vertex": [2], "lists": [[0]], "matchings": {}}
        with pytest.raises(MalformedInputError, match="k_per_vertex"):
            cover_from_json_dict(doc)

    def test_schema_errors(self):
        with pytest.raises(MalformedInputError):
            cover_from_json_dict({"lists": [[0]]})
        with pytest.raises(MalformedInputError):
            cover_from_json_dict({"lists": [[0]], "matchings": {"xy": []}})

    def test_make_cover_canonicalizes_reversed_keys(self):
        cover = make_cover([[0], [1]], {(1, 0): [(1, 0)]})
        assert cover.matchings == {(0, 1): ((0, 1),)}


@given(st.integers(0, 10_000), st.integers(1, 4))
@settings(max_examples=30, deadline=None)
def test_random_cover_always_validates(seed, k):
    g = random_graph(seed, 3 + seed % 6, 0.5)
    assert validate_cover(g, random_cover(g, k, seed)) == []
    assert validate_cover(g, random_cover(g, k, seed, mode="bernoulli", q=0.3)) == []


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_lift_always_validates(seed):
    from corrcolor.rng import derive_rng

    rng = derive_rng(seed, "lift-lists")
    g = random_graph(seed, 2 + seed % 6, 0.5)
    lists = [
        list(rng.choice(5, size=int(rng.integers(1, 4)), replace=False))
        for _ in range(g.n)
    ]
    assert validate_cover(g, lift_from_lists(g, lists)) == []

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrcolor import (
    DomainError,
    MalformedInputError,
    average_degree,
    build_graph,
    gen_complete_bipartite,
    gen_cycle,
    gen_random_bipartite_regular,
    gen_random_regular,
    graph_from_json_dict,
    graph_to_json_dict,
    is_triangle_free,
    max_degree,
    parse_dimacs,
)
from corrcolor.graphs import Graph

from .conftest import brute_force_triangle_free, petersen, random_graph


class TestBuildGraph:
    def test_cycle_degrees(self):
        g = build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        assert g.m == 4
        assert all(g.degree(v) == 2 for v in range(4))

    def test_single_vertex(self):
        g = build_graph(1, [])
        assert g.n == 1 and g.m == 0 and g.degree(0) == 0

    def test_duplicate_edges_deduplicated(self):
        g = build_graph(3, [(0, 1), (1, 0), (1, 2)])
        assert g.m == 2

    def test_self_loop_rejected(self):
        with pytest.raises(DomainError, match="self-loop"):
            build_graph(3, [(1, 1)])

    def test_out_of_range_rejected(self):
        with pytest.raises(DomainError, match="out of range"):
            build_graph(3, [(0, 3)])

    def test_adjacency_symmetric(self):
        g = random_graph(3, 12, 0.4)
        for u in range(g.n):
            for v in g.adjacency[u]:
                assert u in g.adjacency[v]


class TestStatistics:
    def test_average_degree_cycle(self):
        assert average_degree(gen_cycle(4)) == 2.0

    def test_average_degree_k88(self):
        assert average_degree(gen_complete_bipartite(8, 8)) == 8.0

    def test_average_degree_path(self):
        g = build_graph(3, [(0, 1), (1, 2)])
        assert average_degree(g) == pytest.approx(4 / 3)

    def test_average_degree_empty_graph_rejected(self):
        with pytest.raises(DomainError):
            average_degree(build_graph(0, []))

    def test_max_degree_star(self):
        assert max_degree(gen_complete_bipartite(1, 5)) == 5

    def test_max_degree_cycle(self):
        assert max_degree(gen_cycle(6)) == 2

    def test_max_degree_edgeless(self):
        assert max_degree(build_graph(3, [])) == 0


class TestTriangleFree:
    def test_k3(self):
        assert not is_triangle_free(build_graph(3, [(0, 1), (1, 2), (0, 2)]))

    def test_c5(self):
        assert is_triangle_free(gen_cycle(5))

    def test_petersen(self):
        g = petersen()
        assert g.m == 15
        assert brute_force_triangle_free(g)
        assert is_triangle_free(g)

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_matches_brute_force(self, seed):
        g = random_graph(seed, 9 + seed % 12, 0.3)
        assert is_triangle_free(g) == brute_force_triangle_free(g)


class TestGenerators:
    def test_cycle(self):
        g = gen_cycle(4)
        assert g.m == 4
        with pytest.raises(DomainError):
            gen_cycle(2)

    def test_complete_bipartite(self):
        g = gen_complete_bipartite(8, 8)
        assert g.m == 64
        assert all(g.degree(v) == 8 for v in range(16))

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_random_regular_degrees(self, seed):
        g = gen_random_regular(10, 3, seed)
        assert all(g.degree(v) == 3 for v in range(10))
        assert g.m == 15

    def test_random_regular_triangle_free_flag(self):
        g = gen_random_regular(16, 3, seed=5, triangle_free=True)
        assert is_triangle_free(g)
        assert all(g.degree(v) == 3 for v in range(16))

    def test_random_regular_infeasible(self):
        with pytest.raises(DomainError, match="infeasible"):
            gen_random_regular(5, 3, seed=0)  # odd stub count
        with pytest.raises(DomainError, match="infeasible"):
            gen_random_regular(4, 4, seed=0)

    def test_random_regular_cap_exhausted(self):
        # 6-regular on 10 vertices exceeds the triangle-free edge maximum, so
        # the rejection loop must give up.
        with pytest.raises(DomainError, match="attempts"):
            gen_random_regular(10, 6, seed=0, triangle_free=True)

    def test_handshake_identity(self):
        for g in (gen_cycle(9), gen_complete_bipartite(3, 5), gen_random_regular(12, 4, 1)):
            assert sum(g.degree(v) for v in range(g.n)) == 2 * g.m

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_bipartite_regular(self, seed):
        g = gen_random_bipartite_regular(20, 6, seed)
        assert g.n == 40
        assert all(g.degree(v) == 6 for v in range(40))
        assert is_triangle_free(g)
        # bipartite: no edge inside either side
        assert all(u < 20 <= v for u, v in g.edges)

    def test_bipartite_regular_deterministic(self):
        assert gen_random_bipartite_regular(15, 5, 3) == gen_random_bipartite_regular(15, 5, 3)

    def test_random_regular_deterministic(self):
        assert gen_random_regular(10, 3, 9) == gen_random_regular(10, 3, 9)


class TestIO:
    def test_json_round_trip(self):
        g = random_graph(11, 13, 0.35)
        doc = graph_to_json_dict(g)
        assert graph_from_json_dict(json.loads(json.dumps(doc))) == g

    def test_json_schema_errors(self):
        with pytest.raises(MalformedInputError):
            graph_from_json_dict({"edges": []})
        with pytest.raises(MalformedInputError):
            graph_from_json_dict({"n": 2, "edges": [["a", "b"]]})

    def test_dimacs(self):
        text = "c a comment\np edge 4 3\ne 1 2\ne 2 3\ne 3 4\n"
        g = parse_dimacs(text)
        assert g == build_graph(4, [(0, 1), (1, 2), (2, 3)])

    def test_dimacs_missing_header(self):
        with pytest.raises(MalformedInputError, match="header"):
            parse_dimacs("e 1 2\n")

    def test_dimacs_unknown_record(self):
        with pytest.raises(MalformedInputError, match="unknown record"):
            parse_dimacs("p edge 2 1\nx 1 2\n")

    def test_graph_equality_and_csr(self):
        g = gen_cycle(5)
        ptr, idx = g.csr
        assert ptr[-1] == 2 * g.m
        assert list(idx[ptr[0] : ptr[1]]) == [1, 4]

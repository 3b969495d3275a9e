import numpy as np
import pytest

from deepopt.core import rng_stream
from deepopt.problems import (
    make_instance,
    read_edge_list,
    read_pgm,
    write_edge_list,
    write_pgm,
)

PI_HALF_GENE = (np.pi / 2) / 100.0


class TestSines:
    def test_all_zero_genes(self):
        assert make_instance("sines", 0).evaluate(np.zeros(50)) == 0.0

    def test_pi_half_genes(self):
        got = make_instance("sines", 0).evaluate(np.full(50, PI_HALF_GENE))
        assert got == pytest.approx(50 * np.pi / 2, rel=1e-12)

    def test_wrong_dimension(self):
        with pytest.raises(ValueError):
            make_instance("sines", 0).evaluate(np.zeros(49))


class TestNoisySines:
    def test_noise_bounds_at_zero(self):
        problem = make_instance("noisy-sines", 0)
        rng = rng_stream(1, 0)
        for _ in range(50):
            got = problem.evaluate(np.zeros(50), rng)
            assert 0.0 <= got <= 0.5

    def test_noiseless_term(self):
        problem = make_instance("noisy-sines", 0)
        got = problem.true_score(np.full(50, PI_HALF_GENE))
        assert got == pytest.approx(78.53981633974483 / 5000.0, rel=1e-12)

    def test_fresh_noise_each_call(self):
        problem = make_instance("noisy-sines", 0)
        rng = rng_stream(2, 0)
        x = np.full(50, 0.3)
        base = problem.true_score(x)
        draws = [problem.evaluate(x, rng) for _ in range(20)]
        assert len(set(draws)) > 1
        assert all(base <= d <= base + 0.5 for d in draws)

    def test_rng_required(self):
        with pytest.raises(ValueError):
            make_instance("noisy-sines", 0).evaluate(np.zeros(50))


class TestSeating:
    def tiny(self, groups=2, tables=1, capacity=12):
        return make_instance("seating", 0, groups=groups, tables=tables,
                             capacity=capacity)

    def test_mutual_preference_counted_both_ways(self):
        problem = self.tiny()
        problem.preferences = np.array([[0.0, 10.0], [10.0, 0.0]])
        problem.group_sizes = np.array([1, 1])
        both_seated = np.array([0.9, 0.8])
        assert problem.evaluate(both_seated) == pytest.approx(20.0)

    def test_capacity_pigeonhole_penalty(self):
        problem = make_instance("seating", 0)
        problem.group_sizes = np.full(50, 3)
        problem.preferences = np.zeros((50, 50))
        score = problem.evaluate(rng_stream(3, 0).random(500))
        # 150 people onto 120 seats: at least 10 whole groups stay unseated
        assert score <= -30 * 1000

    def test_decode_respects_capacity_and_uniqueness(self):
        problem = make_instance("seating", 1)
        rng = rng_stream(4, 0)
        for _ in range(10):
            assignment = problem.decode(rng.random(500))
            for t in range(problem.tables):
                members = assignment == t
                assert problem.group_sizes[members].sum() <= problem.capacity

    def test_tie_break_is_flat_index_order(self):
        problem = self.tiny(groups=2, tables=2, capacity=1)
        problem.group_sizes = np.array([1, 1])
        problem.preferences = np.zeros((2, 2))
        # all bids equal: group 0 takes table 0, group 1 the next free slot
        assignment = problem.decode(np.full(4, 0.5))
        assert assignment.tolist() == [0, 1]


class TestBandwidth:
    def test_path_graph_in_order(self):
        problem = make_instance("bandwidth", 0, vertices=3, edges=2,
                                edge_list=[(0, 1), (1, 2)])
        assert problem.evaluate(np.array([0.1, 0.5, 0.9])) == -1.0

    def test_complete_graph_any_labeling(self):
        n = 5
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
        problem = make_instance("bandwidth", 0, vertices=n, edges=len(edges),
                                edge_list=edges)
        for seed in range(5):
            labeling = rng_stream(seed, 0).random(n)
            assert problem.evaluate(labeling) == -(n - 1)

    def test_labels_are_a_permutation(self):
        problem = make_instance("bandwidth", 0)
        labels = problem.decode(rng_stream(5, 0).random(50))
        assert sorted(labels.tolist()) == list(range(1, 51))

    def test_equal_genes_tie_break_by_vertex_index(self):
        problem = make_instance("bandwidth", 0, vertices=4, edges=1, edge_list=[(0, 3)])
        labels = problem.decode(np.zeros(4))
        assert labels.tolist() == [1, 2, 3, 4]


class TestConstraints:
    def one_edge(self):
        return make_instance("constraints-real", 0, nodes=2, edges=1,
                             edge_list=[(0, 1)])

    def test_satisfied_edge_no_error(self):
        assert self.one_edge().evaluate(np.array([0.9, 0.1])) == 0.0

    def test_violated_edge_absolute_difference(self):
        assert self.one_edge().evaluate(np.array([0.1, 0.9])) == pytest.approx(-0.8)

    def test_parity_score_is_margin(self):
        problem = self.one_edge()
        assert problem.parity_score(np.array([0.1, 0.9])) == pytest.approx(0.2)

    def test_discrete_argmax_letter(self):
        problem = make_instance("constraints-discrete", 0, nodes=2, edges=1,
                                edge_list=[(0, 1)])
        genes = np.zeros(32)
        genes[1] = 0.9  # node 0 -> letter B
        genes[0] = 0.1
        genes[16] = 1.0  # node 1 -> letter A
        assert problem.decode(genes).tolist() == [1, 0]

    def test_discrete_identical_blocks_score_zero(self):
        problem = make_instance("constraints-discrete", 0, nodes=4, edges=6)
        genes = np.tile(np.linspace(0.2, 0.8, 16), 4)
        assert problem.evaluate(genes) == 0.0

    def test_discrete_argmax_tie_prefers_lowest_letter(self):
        problem = make_instance("constraints-discrete", 0, nodes=1, edges=1,
                                edge_list=[(0, 0)])
        problem.edges = np.empty((0, 2), dtype=np.int64)
        assert problem.decode(np.full(16, 0.5)).tolist() == [0]


class TestCrossings:
    def test_two_diagonals_cross_once(self):
        problem = make_instance("crossings", 0, nodes=4, edges=2,
                                edge_list=[(0, 2), (1, 3)])
        square = np.array([[0.1, 0.1], [0.9, 0.1], [0.9, 0.9], [0.1, 0.9]])
        assert problem.evaluate(square.reshape(-1)) == -1.0

    def test_star_graph_shared_endpoints_never_count(self):
        problem = make_instance("crossings", 0, nodes=5, edges=4,
                                edge_list=[(0, 1), (0, 2), (0, 3), (0, 4)])
        points = rng_stream(6, 0).random(10)
        assert problem.evaluate(points) == 0.0

    def test_touch_at_interior_point_counts(self):
        problem = make_instance("crossings", 0, nodes=4, edges=2,
                                edge_list=[(0, 1), (2, 3)])
        pts = np.array([[0.2, 0.5], [0.8, 0.5], [0.5, 0.5], [0.5, 0.9]])
        assert problem.evaluate(pts.reshape(-1)) == -1.0

    def test_collinear_overlap_counts_once(self):
        problem = make_instance("crossings", 0, nodes=4, edges=2,
                                edge_list=[(0, 1), (2, 3)])
        pts = np.array([[0.1, 0.5], [0.6, 0.5], [0.4, 0.5], [0.9, 0.5]])
        assert problem.evaluate(pts.reshape(-1)) == -1.0

    def test_disjoint_segments(self):
        problem = make_instance("crossings", 0, nodes=4, edges=2,
                                edge_list=[(0, 1), (2, 3)])
        pts = np.array([[0.1, 0.1], [0.3, 0.1], [0.1, 0.9], [0.3, 0.9]])
        assert problem.evaluate(pts.reshape(-1)) == 0.0


class TestTriangles:
    def test_zero_intensity_on_black_target(self):
        problem = make_instance("triangles", 0, image=np.zeros((8, 8)), triangles=2)
        genes = rng_stream(7, 0).random(14)
        genes[6] = genes[13] = 0.0  # intensities
        assert problem.evaluate(genes) == pytest.approx(1e9)

    def test_two_half_canvas_triangles_saturate_white_target(self):
        problem = make_instance("triangles", 0, image=np.full((8, 8), 255.0), triangles=2)
        genes = np.array([0, 0, 1, 0, 0, 1, 1.0,
                          1, 1, 1, 0, 0, 1, 1.0])
        assert problem.evaluate(genes) == pytest.approx(1e9)

    def test_non_square_image_rejected(self):
        with pytest.raises(ValueError):
            make_instance("triangles", 0, image=np.zeros((4, 6)))

    def test_wrong_dimension(self):
        problem = make_instance("triangles", 0, triangles=2)
        with pytest.raises(ValueError):
            problem.evaluate(np.zeros(13))


class TestCheckerboard:
    def test_perfect_board_scores_676(self):
        problem = make_instance("checkerboard", 0)
        perfect = (np.indices((15, 15)).sum(axis=0) % 2).reshape(-1).astype(float)
        assert problem.evaluate(perfect) == 676.0
        assert problem.max_score == 676

    def test_all_zeros_grid(self):
        assert make_instance("checkerboard", 0).evaluate(np.zeros(225)) == 0.0

    def test_exact_bits_pass_through(self):
        problem = make_instance("checkerboard", 0, side=5)
        bits = rng_stream(8, 0).integers(0, 2, 25).astype(float)
        thresholded = problem.evaluate(bits)
        assert thresholded == problem.evaluate(np.clip(bits, 0.1, 0.9) * 0 + bits)


class TestInstances:
    def test_same_seed_same_edges(self):
        a = make_instance("bandwidth", 3)
        b = make_instance("bandwidth", 3)
        assert np.array_equal(a.edges, b.edges)

    def test_different_seeds_differ(self):
        a = make_instance("constraints-real", 1)
        b = make_instance("constraints-real", 2)
        assert not np.array_equal(a.edges, b.edges)

    def test_seating_sizes_in_range(self):
        problem = make_instance("seating", 9)
        assert set(np.unique(problem.group_sizes)) <= {1, 2, 3}
        assert problem.preferences.shape == (50, 50)
        assert (np.diag(problem.preferences) == 0).all()

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_instance("tsp", 0)

    def test_default_dimensions(self):
        expected = {"sines": 50, "noisy-sines": 50, "seating": 500, "bandwidth": 50,
                    "constraints-real": 100, "constraints-discrete": 1600,
                    "crossings": 50, "triangles": 350, "checkerboard": 225}
        for kind, dim in expected.items():
            assert make_instance(kind, 0).dimension == dim


class TestFileFormats:
    def test_pgm_roundtrip_binary_and_ascii(self, tmp_path):
        img = (rng_stream(10, 0).random((9, 9)) * 255).round()
        for binary in (True, False):
            path = tmp_path / f"img_{binary}.pgm"
            write_pgm(path, img, binary=binary)
            back = read_pgm(path)
            assert np.array_equal(back, img)

    def test_pgm_comments_and_errors(self, tmp_path):
        path = tmp_path / "c.pgm"
        path.write_text("P2\n# a comment\n2 2\n255\n0 10\n20 30\n")
        assert np.array_equal(read_pgm(path), [[0, 10], [20, 30]])
        bad = tmp_path / "bad.pgm"
        bad.write_text("P2\n2 2\n65535\n0 0 0 0\n")
        with pytest.raises(ValueError):
            read_pgm(bad)

    def test_edge_list_roundtrip(self, tmp_path):
        path = tmp_path / "edges.txt"
        write_edge_list(path, [(0, 1), (2, 3)])
        assert read_edge_list(path) == [(0, 1), (2, 3)]
        path.write_text("# header\n0 1\n2 3  # trailing\n\n")
        assert read_edge_list(path) == [(0, 1), (2, 3)]

    def test_problem_from_edge_file(self, tmp_path):
        path = tmp_path / "g.txt"
        write_edge_list(path, [(0, 1), (1, 2)])
        problem = make_instance("bandwidth", 0, vertices=3, edges=2,
                                edge_list=read_edge_list(path))
        assert problem.evaluate(np.array([0.1, 0.5, 0.9])) == -1.0

import numpy as np

from genet import graphs, linalg, oracle
from genet.graphs import LabelSet


class TestBruteGraphs:
    def test_hand_computed_three_points(self):
        X = np.array([[0.0, 1.0, 10.0]])
        labels = LabelSet(np.array([1, 1, 1]))
        W = oracle.brute_knn_graph(X, labels, 1)
        expected = np.zeros((3, 3))
        expected[0, 1] = expected[1, 0] = 1.0
        expected[1, 2] = expected[2, 1] = 1.0
        assert np.array_equal(W, expected)

    def test_singleton_classes_empty(self):
        X = np.array([[0.0, 3.0]])
        W = oracle.brute_knn_graph(X, LabelSet(np.array([1, 2])), 2)
        assert np.array_equal(W, np.zeros((2, 2)))

    def test_two_singletons_penalty_single_edge(self):
        X = np.array([[0.0, 3.0]])
        W = oracle.brute_penalty_pairs(X, LabelSet(np.array([1, 2])), 7)
        assert np.array_equal(W, [[0.0, 1.0], [1.0, 0.0]])

    def test_matches_main_path_on_random_fixtures(self):
        for seed in range(30):
            X, labels = oracle.gaussian_blobs(
                seed, n_features=3, n_per_class=10, n_classes=2)
            assert np.array_equal(
                oracle.brute_knn_graph(X, labels, 3),
                graphs.mfa_intrinsic_graph(X, labels, 3))
            assert np.array_equal(
                oracle.brute_penalty_pairs(X, labels, 12),
                graphs.mfa_penalty_graph(X, labels, 12))

    def test_tie_fixture_resolved_identically(self):
        # integer coordinates make many pair distances exactly equal
        rng = np.random.default_rng(3)
        X = rng.integers(0, 3, size=(2, 16)).astype(float)
        labels = LabelSet(np.array([1, 2] * 8))
        assert np.array_equal(
            oracle.brute_knn_graph(X, labels, 2),
            graphs.mfa_intrinsic_graph(X, labels, 2))
        assert np.array_equal(
            oracle.brute_penalty_pairs(X, labels, 5),
            graphs.mfa_penalty_graph(X, labels, 5))


class TestBruteScatter:
    def test_equals_graph_form(self):
        X, labels = oracle.gaussian_blobs(7, n_features=4, n_per_class=9,
                                          n_classes=3)
        S_W, S_B = oracle.brute_scatter(X, labels)
        gp = graphs.lda_graph(labels)
        _, L = graphs.laplacian(gp.W)
        assert np.linalg.norm(X @ L @ X.T - S_W) <= 1e-8 * (1 + np.linalg.norm(S_W))

    def test_single_class_between_scatter_vanishes(self):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((3, 12))
        labels = LabelSet(np.ones(12, dtype=int))
        S_W, S_B = oracle.brute_scatter(X, labels)
        assert np.allclose(S_B, 0.0, atol=1e-12)
        Xc, _ = linalg.center_columns(X)
        NC = Xc @ Xc.T
        assert np.linalg.norm(NC - S_W - S_B) <= 1e-8 * (1 + np.linalg.norm(NC))

    def test_zero_variance_class_contributes_nothing(self):
        X = np.array([[1.0, 1.0, 1.0, 5.0, 7.0]])
        labels = LabelSet(np.array([1, 1, 1, 2, 2]))
        S_W, _ = oracle.brute_scatter(X, labels)
        only_class2 = oracle.brute_scatter(X[:, 3:], LabelSet(np.array([1, 1])))[0]
        assert np.allclose(S_W, only_class2)


class TestRayleighCheck:
    def test_identity_constraint_tiny_residual(self):
        rng = np.random.default_rng(13)
        A = rng.standard_normal((6, 6))
        A = A + A.T
        vals, vecs = linalg.sym_eig(A)
        assert oracle.rayleigh_check(A, np.eye(6), vals, vecs) < 1e-10

    def test_random_pd_constraint(self):
        rng = np.random.default_rng(17)
        A = rng.standard_normal((5, 5))
        A = A + A.T
        Q = rng.standard_normal((5, 5))
        M = Q @ Q.T + np.eye(5)
        vals, vecs = linalg.gen_eig(A, M, ridge=0.0)
        bound = 1e-6 * (1 + np.linalg.norm(A) + np.linalg.norm(M))
        assert oracle.rayleigh_check(A, M, vals, vecs) <= bound

    def test_detects_perturbed_eigenvector(self):
        rng = np.random.default_rng(19)
        A = rng.standard_normal((5, 5))
        A = A + A.T
        vals, vecs = linalg.sym_eig(A)
        vecs = vecs.copy()
        vecs[:, 2] += 0.05
        assert oracle.rayleigh_check(A, np.eye(5), vals, vecs) > 1e-3


class TestFixtures:
    def test_blobs_deterministic(self):
        X1, l1 = oracle.gaussian_blobs(5)
        X2, l2 = oracle.gaussian_blobs(5)
        assert np.array_equal(X1, X2)
        assert np.array_equal(l1.labels, l2.labels)

    def test_blob_dataset_nonnegative(self):
        ds = oracle.blobs_dataset(5)
        assert ds.X.min() >= 0.0
        assert ds.n_samples <= 200

    def test_rank_deficient(self):
        X = oracle.rank_deficient_data(5, n_features=20, rank=10, n_samples=50)
        assert np.linalg.matrix_rank(X) == 10

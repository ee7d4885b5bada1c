import math

import numpy as np
import pytest

import fine


def pairwise_euclidean(points):
    n = len(points)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = float(np.linalg.norm(points[i] - points[j]))
    return d


def test_version_and_exports():
    assert fine.__version__
    assert issubclass(fine.DimensionError, fine.Error)
    assert issubclass(fine.SupportError, fine.Error)


def test_closed_form_gaussian_distances():
    a = fine.GaussianParams(mu=0.0, sigma=1.0)
    b = fine.GaussianParams(mu=1.0, sigma=1.0)
    assert fine.kl_gaussian_closed(a, b) == pytest.approx(0.5, abs=1e-12)
    expected = math.sqrt(2.0) * math.log(2.0)
    assert fine.fisher_gaussian_closed(a, b) == pytest.approx(expected, abs=1e-9)
    assert fine.fisher_gaussian_closed(a, a) == 0.0


def test_kde_fit_and_eval():
    rng = np.random.default_rng(3)
    samples = rng.normal(size=(80, 2))
    kde = fine.fit_kde(samples)
    assert kde.dim == 2
    assert kde.n_samples == 80
    assert kde.bandwidths.shape == (2,)
    x = np.array([0.1, -0.2])
    assert kde.eval(x) == pytest.approx(math.exp(kde.log_eval(x)))
    # row order must not matter, down to the last bit
    shuffled = fine.fit_kde(samples[::-1].copy())
    assert kde.log_eval(x) == shuffled.log_eval(x)


def test_kl_empirical_between_shifted_normals():
    rng = np.random.default_rng(11)
    p = fine.fit_kde(rng.normal(size=(500, 1)))
    q = fine.fit_kde(rng.normal(loc=1.0, size=(500, 1)))
    kl = fine.kl_empirical(p, q)
    assert 0.2 < kl < 0.8
    assert fine.kl_empirical(p, p) == 0.0
    assert fine.kl_symmetric(p, q) >= kl
    assert fine.fisher_approx_from_kl(p, q) == pytest.approx(
        math.sqrt(fine.kl_symmetric(p, q))
    )


def test_multinomial_distances():
    p = fine.term_frequency_pdf(np.array([3, 0, 1, 4], dtype=np.int32))
    assert p.probs == pytest.approx([0.375, 0.0, 0.125, 0.5])
    half = fine.normalized_pdf(np.array([1.0, 1.0]))
    point = fine.normalized_pdf(np.array([1.0, 0.0]))
    assert fine.hellinger_multinomial(half, point) == pytest.approx(
        0.7653668647301796, abs=1e-12
    )
    assert fine.cosine_multinomial(half, point) == pytest.approx(math.pi / 2, abs=1e-12)
    disjoint_a = fine.normalized_pdf(np.array([1.0, 0.0]))
    disjoint_b = fine.normalized_pdf(np.array([0.0, 1.0]))
    assert fine.hellinger_multinomial(disjoint_a, disjoint_b) == pytest.approx(
        math.sqrt(2.0), abs=1e-12
    )
    d0 = fine.alpha_divergence_multinomial(half, point, 0.0)
    dh = fine.hellinger_multinomial(half, point)
    assert d0 == pytest.approx(2.0 * dh * dh, abs=1e-12)


def test_dimension_and_support_errors():
    p = fine.normalized_pdf(np.array([0.5, 0.5]))
    q = fine.normalized_pdf(np.array([0.2, 0.3, 0.5]))
    with pytest.raises(fine.DimensionError):
        fine.hellinger_multinomial(p, q)
    point = fine.normalized_pdf(np.array([1.0, 0.0]))
    with pytest.raises(fine.SupportError):
        fine.alpha_divergence_multinomial(p, point, -1.0)
    with pytest.raises(fine.InsufficientSamplesError):
        fine.fit_kde(np.zeros((0, 2)))


def test_dissimilarity_matrix_and_csv_round_trip(tmp_path):
    pdfs = [
        fine.normalized_pdf(np.array([0.7, 0.2, 0.1])),
        fine.normalized_pdf(np.array([0.1, 0.8, 0.1])),
        fine.normalized_pdf(np.array([0.3, 0.3, 0.4])),
    ]
    ids = ["a", "b", "c"]
    d = fine.build_dissimilarity_matrix(pdfs, ids, fine.Metric.hellinger)
    d.validate()
    assert d.size == 3
    assert np.array_equal(d.values, d.values.T)
    assert np.all(np.diag(d.values) == 0.0)

    path = str(tmp_path / "d.csv")
    fine.save_dissimilarity_csv(d, path)
    back = fine.load_dissimilarity_csv(path, fine.Metric.hellinger)
    assert back.ids == ids
    assert np.array_equal(back.values, d.values)

    threaded = fine.build_dissimilarity_matrix(pdfs, ids, fine.Metric.hellinger, threads=4)
    assert np.array_equal(threaded.values, d.values)


def test_geodesic_chain():
    # colinear points: shortest paths along the chain match direct distances
    xs = np.array([0.0, 1.0, 3.0, 7.0])
    d = fine.DissimilarityMatrix()
    d.values = np.abs(xs[:, None] - xs[None, :])
    d.metric = fine.Metric.euclidean_l2
    d.ids = list("abcd")
    g = fine.build_neighbor_graph(d, 1)
    assert g.connected
    assert [(e.i, e.j) for e in g.edges] == [(0, 1), (1, 2), (2, 3)]
    geo = fine.geodesic_distances(g, d.ids, d.metric)
    assert np.array_equal(geo.values, d.values)


def test_classical_mds_recovers_euclidean_configuration():
    rng = np.random.default_rng(5)
    points = rng.normal(size=(12, 3))
    d = fine.DissimilarityMatrix()
    d.values = pairwise_euclidean(points)
    d.metric = fine.Metric.euclidean_l2
    d.ids = [f"p{i}" for i in range(12)]
    e = fine.classical_mds(d, 3)
    assert e.coords.shape == (12, 3)
    recon = pairwise_euclidean(e.coords)
    assert np.max(np.abs(recon - d.values)) < 1e-8
    assert e.negative_eigen_mass < 1e-10


def test_laplacian_eigenmaps_and_ccdr_agree_at_zero_beta():
    rng = np.random.default_rng(9)
    points = rng.normal(size=(10, 2))
    d = fine.DissimilarityMatrix()
    d.values = pairwise_euclidean(points)
    d.metric = fine.Metric.euclidean_l2
    d.ids = [f"s{i}" for i in range(10)]
    params = fine.LemParams(k_neighbors=4)
    lem = fine.laplacian_eigenmaps(d, 2, params)
    assert lem.coords.shape == (10, 2)
    assert lem.spectrum[0] > 0.0
    labels = [0, 0, 0, 0, 0, 1, 1, 1, 1, None]
    same = fine.ccdr(d, labels, 2, params)
    assert np.array_equal(same.coords, lem.coords)
    pulled = fine.ccdr(d, labels, 2, fine.LemParams(k_neighbors=4, label_weight_beta=5.0))
    assert pulled.beta == 5.0


def test_knn_classify():
    train = np.array([[0.0], [0.1], [5.0], [5.1]])
    labels = [0, 0, 1, 1]
    test = np.array([[0.05], [5.05]])
    assert fine.knn_classify(train, labels, test, 3) == [0, 1]


def test_jacobi_eigen_contract():
    rng = np.random.default_rng(21)
    a = rng.normal(size=(30, 30))
    a = (a + a.T) / 2.0
    values, vectors = fine.jacobi_eigen(a)
    assert np.all(np.diff(values) >= 0)
    assert np.max(np.abs(vectors @ np.diag(values) @ vectors.T - a)) < 1e-10
    assert np.max(np.abs(vectors.T @ vectors - np.eye(30))) < 1e-12


def test_swiss_roll_generator_is_seeded():
    sets_a, ids_a, means_a = fine.gen_swiss_roll_sets(5, 20, 0.5, seed=7)
    sets_b, _, means_b = fine.gen_swiss_roll_sets(5, 20, 0.5, seed=7)
    assert len(sets_a) == 5
    assert sets_a[0].shape == (20, 3)
    assert len(ids_a) == len(set(ids_a)) == 5
    assert np.array_equal(means_a, means_b)
    assert all(np.array_equal(x, y) for x, y in zip(sets_a, sets_b))


def test_document_pipeline_end_to_end():
    counts, ids, labels = fine.gen_multinomial_clusters(2, 40, 8, 300, 0.2, seed=4)
    pdfs = [fine.term_frequency_pdf(c) for c in counts]
    d = fine.build_dissimilarity_matrix(pdfs, ids, fine.Metric.hellinger)
    within = [
        d.values[i, j]
        for i in range(16)
        for j in range(i + 1, 16)
        if labels[i] == labels[j]
    ]
    across = [
        d.values[i, j]
        for i in range(16)
        for j in range(i + 1, 16)
        if labels[i] != labels[j]
    ]
    assert np.mean(within) < np.mean(across)

    # well separated classes fragment the kNN graph, so bridge it first
    g = fine.build_neighbor_graph(d, 5)
    g, added = fine.ensure_connected(g, d)
    assert g.connected
    assert added >= 0
    e = fine.ccdr(g, ids, labels, 2, fine.LemParams(label_weight_beta=1.0))
    guesses = fine.knn_classify(e.coords, labels, e.coords, 3)
    agreement = np.mean([g == t for g, t in zip(guesses, labels)])
    assert agreement >= 0.9

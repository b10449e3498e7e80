import math

import numpy as np
import pytest
from scipy import stats

from fgnet import gmc
from fgnet.errors import ConfigError, DomainError, ResourceLimitError
from fgnet.generate import (
    FgnParams,
    SbmParams,
    edge_prob,
    generate_graph,
    generate_sbm,
    sample_nodes,
    sigma_for,
    wire_edges,
)
from fgnet.rng import derive_seed, pair_uniforms


def assert_simple(g):
    e = g.edges
    assert np.all(e[:, 0] < e[:, 1])
    assert len(np.unique(e, axis=0)) == len(e)
    assert e.size == 0 or e.max() < g.num_nodes


def test_sigma_examples():
    assert sigma_for(10000, 1, 2) == pytest.approx(0.0056419, rel=1e-5)
    assert sigma_for(1000, 1, 1) == pytest.approx(5.6419e-4, rel=1e-4)
    for d in (1, 2, 3, 5):
        assert sigma_for(1, math.pi ** (d / 2), d) == pytest.approx(1.0, rel=1e-12)


def test_edge_prob_examples():
    x = np.zeros(2)
    s = 0.01
    assert edge_prob(x, x, s) == 1.0
    assert edge_prob(x, x, s, "hard") == 1.0
    assert edge_prob(x, np.array([s, 0.0]), s) == pytest.approx(math.exp(-1), abs=1e-12)
    assert edge_prob(x, np.array([0.0, 1.01 * s]), s, "hard_threshold") == 0.0
    with pytest.raises(ConfigError):
        edge_prob(x, x, s, "bogus")


def test_poisson_node_count():
    mu = gmc.lebesgue(2)
    counts = np.array([sample_nodes(mu, 100, seed=s).count for s in range(1000)])
    assert abs(counts.mean() - 100) < 3 * math.sqrt(100 / 1000)
    assert counts.var() == pytest.approx(100, rel=0.15)


def test_node_count_variance_given_measure():
    mu = gmc.sample_gmc(math.sqrt(0.6), 2, 32, seed=4)
    n = 300
    counts = np.array([sample_nodes(mu, n, seed=s).count for s in range(1500)])
    assert counts.mean() == pytest.approx(n * mu.total_mass, rel=0.03)
    assert counts.var() == pytest.approx(n * mu.total_mass, rel=0.15)


def test_single_cell_points_uniform():
    pts = sample_nodes(gmc.lebesgue(2, 1), 4000, seed=1).positions
    assert np.all(np.abs(pts) <= 0.5)
    for axis in range(2):
        assert stats.kstest(pts[:, axis] + 0.5, "uniform").pvalue > 1e-3


def test_nodes_follow_cell_masses():
    mu = gmc.sample_gmc(1.0, 1, 8, seed=3)
    pts = sample_nodes(mu, 20000, seed=5).positions[:, 0]
    hist, _ = np.histogram(pts, bins=8, range=(-0.5, 0.5))
    want = mu.cell_masses / mu.total_mass * len(pts)
    assert stats.chisquare(hist, want).pvalue > 1e-3


def test_node_cap():
    with pytest.raises(ResourceLimitError):
        sample_nodes(gmc.lebesgue(2), 1000, seed=0, max_nodes=10)


def test_generation_determinism_and_simplicity():
    p = FgnParams.from_nu(n=800, nu=0.3, seed=11)
    a, b = generate_graph(p), generate_graph(p)
    assert np.array_equal(a.edges, b.edges)
    assert np.array_equal(a.positions, b.positions)
    assert_simple(a)
    c = generate_graph(FgnParams.from_nu(n=800, nu=0.3, seed=12))
    assert not (c.num_nodes == a.num_nodes and np.array_equal(a.edges, c.edges))


def test_mean_degree_gamma_zero():
    degs = []
    for s in range(60):
        g = generate_graph(FgnParams(n=2000, rho=1.0, seed=s))
        assert_simple(g)
        degs.append(2 * g.num_edges / g.num_nodes)
    assert np.mean(degs) == pytest.approx(1.0, rel=0.05)


def test_vanishing_rho_gives_no_edges():
    counts = [generate_graph(FgnParams(n=1000, rho=1e-6, seed=s)).num_edges for s in range(20)]
    assert sum(counts) == 0


def test_edges_nondecreasing_in_rho():
    seeds = range(30)
    means = []
    for rho in (0.5, 1.0, 2.0):
        means.append(np.mean([generate_graph(FgnParams(n=1000, rho=rho, seed=s)).num_edges for s in seeds]))
    assert means[0] <= means[1] <= means[2]


def test_hard_model_edges_are_within_sigma():
    p = FgnParams(n=1500, rho=2.0, edge_model="hard", seed=3)
    g = generate_graph(p)
    dist = np.linalg.norm(g.positions[g.edges[:, 0]] - g.positions[g.edges[:, 1]], axis=1)
    assert np.all(dist <= p.sigma)
    # every close pair is an edge
    from scipy.spatial import cKDTree

    close = cKDTree(g.positions).query_pairs(p.sigma * (1 - 1e-9), output_type="ndarray")
    assert len(close) <= g.num_edges


def test_cutoff_path_equals_exact_path_within_cutoff():
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.5, 0.5, (1200, 2))
    sigma = sigma_for(1200, 3.0, 2)
    key = 0xABCDEF
    exact = wire_edges(pts, sigma, key, exact_limit=10**6)
    cut = wire_edges(pts, sigma, key, exact_limit=0)
    dist = np.linalg.norm(pts[exact[:, 0]] - pts[exact[:, 1]], axis=1)
    inside = exact[dist <= 4 * sigma]
    assert np.array_equal(inside, cut)
    assert len(exact) - len(inside) <= 1


def test_pair_coins_symmetric_and_uniform():
    i = np.arange(5000)
    j = (i * 7 + 3) % 5000
    a = pair_uniforms(5, i, j)
    assert np.array_equal(a, pair_uniforms(5, j, i))
    assert stats.kstest(a, "uniform").pvalue > 1e-3
    assert np.all((a >= 0) & (a < 1))


def test_substreams_are_distinct():
    s = 123
    keys = {derive_seed(s, stream=x) for x in ("field", "nodes", "edges")}
    assert len(keys) == 3
    assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)


def test_injected_measure_must_match():
    mu = gmc.sample_gmc(0.5, 2, 16, seed=1)
    with pytest.raises(ConfigError):
        generate_graph(FgnParams(n=100, gamma=0.7), mu)


def test_params_validation():
    with pytest.raises(ConfigError):
        FgnParams(n=0)
    with pytest.raises(ConfigError):
        FgnParams(n=10, rho=-1)
    with pytest.raises(DomainError):
        FgnParams.from_nu(n=10, nu=2.0)
    with pytest.raises(ConfigError):
        FgnParams(n=10, edge_model="soft")
    assert FgnParams.from_nu(n=10, nu=0.4).gamma == pytest.approx(math.sqrt(0.8))


def test_small_and_empty_graphs_are_valid():
    g = generate_graph(FgnParams(n=1, rho=1, seed=0))
    assert g.num_edges == 0 or g.num_nodes >= 2
    g = generate_graph(FgnParams(n=1, rho=1, seed=5, cells_per_side=1))
    assert_simple(g)


# --- block model ---------------------------------------------------------


def test_sbm_no_inter_edges_when_sigma_out_vanishes():
    p = SbmParams(n=600, gamma1=0.5, gamma2=0.3, sigma_in=sigma_for(1200, 2, 2), sigma_out=1e-9, seed=4, cells_per_side=64)
    g = generate_sbm(p)
    lab = g.labels
    assert np.all(lab[g.edges[:, 0]] == lab[g.edges[:, 1]])
    assert set(np.unique(lab)) <= {0, 1}
    assert np.all(np.diff(lab) >= 0)
    assert_simple(g)


def test_sbm_mean_degree_reduces_to_fgn():
    n, rho = 1000, 1.0
    s = sigma_for(2 * n, rho, 2)
    degs = []
    for seed in range(40):
        g = generate_sbm(SbmParams(n=n, gamma1=0, gamma2=0, sigma_in=s, sigma_out=s, seed=seed))
        degs.append(2 * g.num_edges / g.num_nodes)
    assert np.mean(degs) == pytest.approx(rho, rel=0.05)


def test_sbm_symmetric_matches_single_fgn_degree_law():
    """Equal scales and gamma = 0: the block model is one FGN with intensity 2n."""
    n, s = 500, sigma_for(1000, 1.0, 2)
    a, b = [], []
    for seed in range(200):
        g = generate_sbm(SbmParams(n=n, gamma1=0, gamma2=0, sigma_in=s, sigma_out=s, seed=seed))
        a.extend(g.degrees.tolist())
        h = generate_graph(FgnParams(n=2 * n, rho=1.0, seed=10_000 + seed))
        b.extend(h.degrees.tolist())
    top = 8
    ha = np.bincount(np.minimum(a, top), minlength=top + 1)
    hb = np.bincount(np.minimum(b, top), minlength=top + 1)
    _, pvalue, _, _ = stats.chi2_contingency(np.stack([ha, hb]))
    assert pvalue > 1e-3


def test_sbm_validation():
    with pytest.raises(ConfigError):
        SbmParams(n=10, gamma1=0, gamma2=0, sigma_in=0, sigma_out=0.1)
    with pytest.raises(DomainError):
        SbmParams(n=10, gamma1=3, gamma2=0, sigma_in=0.1, sigma_out=0.1)

"""
Estimating nu and testing for fractality
========================================

From a single graph, nu_hat = ln E / ln N - 1. With m independent graphs
the means of E and N are used instead. The detection rule declares a
network fractal when E exceeds N^(1 + nu0).
"""

from fgnet import FgnParams, detect_fractality, estimate_nu_multi, estimate_nu_single, generate_graph

for nu in (0.0, 0.4):
    graphs = [generate_graph(FgnParams.from_nu(n=2000, nu=nu, seed=s)) for s in range(30)]
    pairs = [(g.num_edges, g.num_nodes) for g in graphs]
    one = estimate_nu_single(*pairs[0])
    many = estimate_nu_multi(pairs)
    flagged = sum(detect_fractality(E, N, nu0=0.3).declared_fractal for E, N in pairs)
    print(f"nu={nu}: single-graph nu_hat {one.nu_hat:.3f}, 30-graph nu_hat {many.nu_hat:.3f}, "
          f"declared fractal {flagged}/30")

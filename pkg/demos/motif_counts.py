"""
Counting motifs
===============

Edges, triangles, k-spokes (a hub with k of its neighbours) and k-cliques,
plus local clustering. Clustering climbs steadily with nu.
"""

from fgnet import FgnParams, generate_graph
from fgnet.motifs import motif_counts

for nu in (0.0, 0.3, 0.6, 0.9):
    g = generate_graph(FgnParams.from_nu(n=800, nu=nu, seed=3))
    c = motif_counts(g, spoke_ks=(1, 2, 3), clique_ks=(3, 4))
    print(f"nu={nu}", c.as_row())

# S_1 = 2E and Q_3 = triangles hold on every graph
assert c.spokes[1] == 2 * c.edges

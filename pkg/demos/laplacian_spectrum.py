"""
Laplacian spectra and eigenvalue peaks
======================================

Highly clustered networks show tall peaks in the eigenvalue histogram:
many eigenvalues exactly at 0 (one per component) and at small integers.
"""

from fgnet import FgnParams, generate_graph
from fgnet.spectral import spectrum

for nu in (0.0, 0.8):
    g = generate_graph(FgnParams.from_nu(n=1200, nu=nu, seed=5))
    rep = spectrum(g)
    peaks = [(round(float(c.value), 3) + 0.0, int(c.count)) for c in rep.clusters if c.is_peak]
    print(f"nu={nu}: N={g.num_nodes} components={rep.num_components} "
          f"zero multiplicity={rep.zero_multiplicity} peaks={peaks[:6]}")

# adjacency scree: |lambda| against rank, for a log-log plot
adj = spectrum(g, "adjacency")
print("top of scree:", [round(float(v), 2) for v in adj.scree[:8, 1]])

"""serieslab: numerical experiments with graded linear series on sphere models.

Submodules
----------
geometry        model spaces, sample sets, quadrature measures
series          graded monomial series, growth fits, Okounkov bodies
weights         metric weights on line bundles over the models
norms           Gram matrices, orthonormalization, sup norms
bergman         partial Bergman kernels and density measures
envelopes       Fubini-Study iterations and radial envelope oracles
energy          Monge-Ampere measures, energies, volume-ratio scans
counterexample  the split-measure divergence construction and its repair
cli             command line driver
"""

__version__ = "0.1.0"

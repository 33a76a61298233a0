"""Numerical tolerances used across the library.

All structural and comparison tolerances live here so that every check in
the code base pulls the same constant instead of re-inventing magic
numbers.  Values fall in two bands: structural validation of states and
operators at 1e-10, and reconstruction / oracle comparisons at 1e-8 to
1e-9.
"""

# Structural validation of operators and states.
HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-10

# Unitarity / completeness of derived objects.
UNITARITY_ATOL = 1e-9
KRAUS_COMPLETENESS_ATOL = 1e-9
RECONSTRUCTION_ATOL = 1e-9

# Entropy handling: eigenvalues are clipped to [0, 1] before taking logs,
# but only if the clip magnitude stays below this limit.
ENTROPY_CLIP_LIMIT = 1e-9
# Below this entropy a bath state counts as pure and entropy ratios are
# undefined.
ENTROPY_FLOOR = 1e-12

# Spectral analysis of channels.
PERIPHERAL_ATOL = 1e-8      # |lambda| within this of the unit circle
DEGENERACY_ATOL = 1e-8      # eigenvalues within this of 1 count as the same
FIXED_POINT_RESIDUAL_ATOL = 1e-8
FIXED_POINT_PSD_ATOL = 1e-8

# Eigenspace grouping and factorized-eigenvector counting.
EIGENSPACE_GROUP_ATOL = 1e-8
FACTORIZED_WEIGHT_ATOL = 1e-8

# Dense superoperator construction is refused above this system dimension
# (the matrix grows as dim**4).
SUPEROPERATOR_DIM_LIMIT = 64

# Iterative fixed-point defaults.
DEFAULT_ITERATE_TOL = 1e-10
DEFAULT_MAX_ITER = 20_000

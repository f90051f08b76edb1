"""Tolerances and defaults, kept in one place so tests and docs agree."""

# Convex hull: coplanarity / point-inside tolerance, relative to the input
# bounding diameter.
EPS_HULL_REL = 1e-9

# Rigid-motion invariance claimed for descriptors (relative).
RIGID_REL_TOL = 1e-6

# Exact-arithmetic identities (scaling laws, hull dominance, isoperimetric
# slack) are checked at this relative tolerance.
STRICT_REL_TOL = 1e-9

# principal_axes declares the covariance degenerate when the second
# eigenvalue falls below this fraction of the first.
DEGENERATE_COV_REL = 1e-12

# rigid_transform rejects rotation matrices further than this from orthonormal.
ROTATION_ORTHO_TOL = 1e-12

# Qualitative relations: threshold tau = EPSILON_REL * model scale.
EPSILON_REL_DEFAULT = 0.05

# Semantic clustering and classification defaults.
DEFAULT_CLUSTERS = 4
DEFAULT_KNN_K = 5
KMEANS_MAX_ITER = 100

# Number of results a query returns by default.
DEFAULT_RESULT_COUNT = 12

# Persisted index schema version.
INDEX_SCHEMA_VERSION = 1

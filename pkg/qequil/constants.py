"""
Constants used throughout the qequil toolkit.
"""

# Verdict and certificate tolerances
DEFAULT_TOLERANCE = 1e-6
DEFAULT_CE_PRECHECK_TOLERANCE = 1e-9
DEFAULT_POVM_GAP_TOLERANCE = 1e-7
DEFAULT_CHANNEL_GAP_TOLERANCE = 1e-6
DUAL_FEASIBILITY_TOLERANCE = 1e-8
PROTOCOL_MATCH_TOLERANCE = 1e-9
EXACT_FACTORIZATION_TOLERANCE = 1e-8  # max-entry residual for a certified rank-r factorization

# Validation tolerances for domain objects
HERMITIAN_TOLERANCE = 1e-12
HERMITIAN_INPUT_TOLERANCE = 1e-10
PROBABILITY_SUM_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-10
NORM_TOLERANCE = 1e-10
PSD_TOLERANCE = 1e-9
TRACE_PRESERVING_TOLERANCE = 1e-9
SUPPORT_THRESHOLD = 1e-12  # entries above this count as support

# Desk-scale caps
MAX_JOINT_STRATEGIES = 4096
MAX_KRON_DIMENSION = 4096
MAX_LOCAL_DIMENSION = 16
MAX_DENSITY_DIMENSION = 4096
MAX_BICLIQUE_DIMENSION = 8
MAX_HJMR_BITS = 10
MAX_FOURIER_SIZE = 64

# Linear algebra kernel
DEFAULT_EIGEN_METHOD = "auto"
EIGEN_METHODS = ("auto", "jacobi", "lapack")
JACOBI_AUTO_MAX_DIMENSION = 32  # "auto" uses Jacobi up to this size, LAPACK above
JACOBI_MAX_SWEEPS = 60
RANK_RELATIVE_TOLERANCE = 1e-12

# Semidefinite solver settings
DEFAULT_SOLVER = "CLARABEL"
SUPPORTED_SOLVERS = ("CLARABEL", "SCS")
SOLVER_OPTIONS = {
    "CLARABEL": {"tol_gap_abs": 1e-10, "tol_gap_rel": 1e-10, "tol_feas": 1e-10, "max_iter": 500},
    "SCS": {"eps_abs": 1e-9, "eps_rel": 1e-9, "max_iters": 200000},
}
# Choi programs larger than this run on the first-order solver
MAX_INTERIOR_POINT_CHOI_DIMENSION = 32
LARGE_PROGRAM_SOLVER = "SCS"

# Nonnegative factorization search
DEFAULT_NN_RESTARTS = 20
DEFAULT_MU_ITERATIONS = 400
DEFAULT_ANLS_ITERATIONS = 300

# Constructions
EPSILON_BRACKET = (1e-6, 1.0 - 1e-12)
EPSILON_BISECTION_ITERATIONS = 200
CONJECTURE_MAX_RESAMPLES = 100
MAX_FAMILY_DEPTH = 64

# Reproducibility
DEFAULT_SEED = 0
FLOAT_SIGNIFICANT_DIGITS = 17

# Logging Settings
DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_OUTPUT_FORMAT = "json"
OUTPUT_FORMATS = ("json", "csv")

# CLI exit codes
EXIT_OK = 0
EXIT_VERDICT_FALSE = 1
EXIT_INPUT_ERROR = 2
EXIT_SOLVER_ERROR = 3

# Separation report columns, in output order
SEPARATION_COLUMNS = (
    "instance",
    "size",
    "rank",
    "rank-lb",
    "nnr-lb",
    "nnr-ub",
    "qcorr-ub(qubits)",
    "rcorr-lb(bits)",
    "notes",
)

"""Numerical defaults shared across the solver modules."""

# Nonlinearity validation and root finding
TOL_ROOT = 1e-10
TOL_MONO = 1e-12
SCAN_POINTS = 10_000
GOLDEN_TOL = 1e-12
LIPSCHITZ_SAFETY = 1.1
VALIDATION_SAMPLES = 1000

# Evolution
DT_SAFETY = 0.9
DT_CAP = 0.02
HULL_DT_CAP = 0.1
DEFAULT_H = 0.05
DEFAULT_HALF_WIDTH = 100.0
DEFAULT_T = 200.0
DEFAULT_TRACE_SAMPLES = 400
LOGISTIC_STEEPNESS = 4.0

# Front fitting
C_TOL = 1e-3
MIN_FIT_SAMPLES = 20
DEFAULT_WINDOW_FRACTION = 0.5

# Hull function
HULL_M = 256
TOL_LAMBDA = 1e-4
TOL_SIGMA = 1e-3
HULL_CHUNK_T = 50.0
HULL_MAX_CHUNKS = 40

# Analysis
TOL_MONOTONE_DIAGRAM = 1e-4
TOL_SUPER = 1e-8
CRITICAL_LEVELS = 5
CRITICAL_DELTA_FRACTION = 0.1

# CSV
CSV_DIGITS = 17

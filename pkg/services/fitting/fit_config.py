
# Loss weights. A 1 cm height violation costs as much as a 0.1 px reprojection shift.
W_2D = 1.0
W_MIMIC_POSE = 0.1
W_MIMIC_SHAPE = 0.5
W_MEASURE = 100.0   # per metre

# The height sweep lets stature follow the measurement target instead of the shape prior
SWEEP_W_MIMIC_SHAPE = 0.01

# Damped least squares
MAX_ITERS = 100
INITIAL_DAMPING = 1e-3
DAMPING_UP = 10.0
DAMPING_DOWN = 0.5
CONVERGENCE_TOL = 1e-12     # relative cost change
JACOBIAN_STEP = 1e-6        # radians / metres / shape units
MAX_DAMPING = 1e12          # stop once no step can lower the cost
ABSOLUTE_COST_TOL = 1e-20
STEP_TOL = 1e-12           # relative parameter step

# Used when a problem has neither init nor reference: similar-triangles depth guess
INIT_FALLBACK_DEPTH = 5.0

RESULT_VERSION = "fit-1"


# World metrics are reported over consecutive windows of this many frames
SEGMENT_LENGTH = 100
# A trailing window shorter than this is dropped (unless it is the only one)
MIN_SEGMENT_FRAMES = 2

# World frame is y-up
GRAVITY_AXIS = 1

# RTE alignment: "yaw" (first-frame anchored rotation about gravity), "rigid", "translation"
RTE_ALIGNMENT = "yaw"

# RTE is undefined for a ground-truth path shorter than this (metres)
MIN_PATH_LENGTH = 1e-3

# Second singular value of the centred source below this fraction of the first
# means the points are collinear
COLLINEAR_TOL = 1e-10

ROOT_JOINT = 0
M_TO_MM = 1000.0

REPORT_VERSION = "report-1"
SEQUENCE_VERSION = "seq-1"

# Procrustes needs this many joints per frame; root-only sequences skip PA, WA and W-MPJPE
MIN_ALIGNMENT_JOINTS = 3

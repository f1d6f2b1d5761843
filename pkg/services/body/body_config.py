
TEMPLATE_VERSION = "bmtpl-1"

NUM_JOINTS = 24
NUM_BETAS = 10
NUM_POSE_JOINTS = NUM_JOINTS - 1   # theta excludes the root

DEFAULT_NUM_VERTICES = 445
MIN_VERTICES = 3 * NUM_JOINTS
TEMPLATE_SEED = 20240611

# Neutral stature of the template and metres of stature per unit of beta[0]
TEMPLATE_HEIGHT = 1.70
HEIGHT_PER_BETA0 = 0.07

# Girth fields (beta[1..9]) move surface vertices horizontally by this much per unit
GIRTH_PER_BETA = 0.01

# Joint-ring vertices sit this far from their joint; the regressor averages them
JOINT_RING_RADIUS = 0.015

# Rest frame is y-up; gravity points along -y
UP_AXIS = 1

JOINT_NAMES = [
    "pelvis", "left_hip", "right_hip", "spine1", "left_knee", "right_knee",
    "spine2", "left_ankle", "right_ankle", "spine3", "left_foot", "right_foot",
    "neck", "left_collar", "right_collar", "head", "left_shoulder", "right_shoulder",
    "left_elbow", "right_elbow", "left_wrist", "right_wrist", "left_hand", "right_hand",
]

PARENTS = [-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21]

# T-pose joint layout, metres, y-up with the soles near y=0 (rescaled to TEMPLATE_HEIGHT)
REST_JOINTS = [
    (0.00, 0.95, 0.00),    # pelvis
    (0.09, 0.86, 0.00),    # left_hip
    (-0.09, 0.86, 0.00),   # right_hip
    (0.00, 1.06, -0.01),   # spine1
    (0.10, 0.48, 0.01),    # left_knee
    (-0.10, 0.48, 0.01),   # right_knee
    (0.00, 1.19, 0.00),    # spine2
    (0.10, 0.08, -0.02),   # left_ankle
    (-0.10, 0.08, -0.02),  # right_ankle
    (0.00, 1.25, 0.01),    # spine3
    (0.11, 0.03, 0.10),    # left_foot
    (-0.11, 0.03, 0.10),   # right_foot
    (0.00, 1.47, -0.01),   # neck
    (0.07, 1.38, 0.00),    # left_collar
    (-0.07, 1.38, 0.00),   # right_collar
    (0.00, 1.56, 0.02),    # head
    (0.17, 1.41, -0.01),   # left_shoulder
    (-0.17, 1.41, -0.01),  # right_shoulder
    (0.43, 1.40, -0.02),   # left_elbow
    (-0.43, 1.40, -0.02),  # right_elbow
    (0.68, 1.41, -0.01),   # left_wrist
    (-0.68, 1.41, -0.01),  # right_wrist
    (0.76, 1.41, -0.01),   # left_hand
    (-0.76, 1.41, -0.01),  # right_hand
]

# Capsule radius of the bone ending at each joint (index = child joint)
BONE_RADII = [
    0.00, 0.10, 0.10, 0.12, 0.07, 0.07, 0.13, 0.05, 0.05, 0.14, 0.04, 0.04,
    0.06, 0.06, 0.06, 0.06, 0.06, 0.06, 0.045, 0.045, 0.035, 0.035, 0.03, 0.03,
]

# Leaf caps: (joint, tip offset, radius); they close the head, hands and feet
LEAF_CAPS = [
    (15, (0.00, 0.05, 0.00), 0.095),
    (22, (0.08, 0.00, 0.00), 0.03),
    (23, (-0.08, 0.00, 0.00), 0.03),
    (10, (0.00, -0.01, 0.06), 0.035),
    (11, (0.00, -0.01, 0.06), 0.035),
]

# Height-neutral proportion field (legs vs torso), metres per unit at the extremities.
# beta[0] carries it on top of isotropic stature; beta[9] carries it alone.
PROPORTION_PER_BETA = 0.0004
PROPORTION_DIR = 9

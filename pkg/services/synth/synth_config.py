
DATASET_VERSION = "synth-1"

# Detector-style crop: square box around the keypoints with this relative margin
BBOX_MARGIN = 0.10

# Default image and pinhole camera for generated sequences
IMAGE_WIDTH = 1280
IMAGE_HEIGHT = 720
FOCAL = 1000.0

# Camera placement: eye height above the ground and distance beyond the path extent (metres)
CAMERA_EYE_HEIGHT = 1.2
CAMERA_STANDOFF = 5.0

# Gait: one full stride cycle per this many metres walked; swing amplitudes in radians
STRIDE_LENGTH = 1.4
HIP_SWING = 0.35
KNEE_BEND = 0.5
ARM_SWING = 0.25

# Default sequence
PATH_LENGTH = 10.0
NUM_FRAMES = 200
FPS = 30.0
SEED = 0

# Depth of the base body in the ambiguity pair (metres)
AMBIGUITY_DEPTH = 4.0


# Focal length used by CLIFF to normalise the bbox encoding
F_CLIFF = 5000.0

# Focal conventions found in the HMR literature
F_FIXED = 5000.0
F_TRACE = 443.4   # stored to one decimal, as printed

# Side of the square network input crop, in pixels
CROP_RESOLUTION = 224

# Rays are unit-normalised unless a caller asks for the z=1 form
DEFAULT_NORMALIZE = True

# Crop-vs-full ray agreement required by the raymap command
CROP_INVARIANCE_TOL = 1e-9

# Binary ray map layout: 8-byte magic, u32 width, u32 height, then <f8 rows
RAYMAP_MAGIC = b"RAYMAP01"
RAYMAP_HEADER_FORMAT = "<8sII"
RAYMAP_DTYPE = "<f8"

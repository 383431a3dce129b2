"""Constants.
"""

# Clamp used for probabilities entering a logarithm
EPSILON = 1e-7

# Board geometry
DEFAULT_SIZE = 19
MIN_SIZE = 5
MAX_SIZE = 19

# Tromp-Taylor komi
KOMI = 7.5

# Number of input planes of the encoder
N_PLANES = 21

# Number of previous positions kept in the input planes
HISTORY = 4

# Ladder reading depth cap, in plies
LADDER_DEPTH = 60

# Training defaults
L2_WEIGHT = 0.0001
BATCH_SIZE = 256
EPOCH_SAMPLES = 1000000
TOTAL_EPOCHS = 200
SCHEDULE = ((0, 0.005), (100, 0.0005), (150, 0.00005))

# Value head hidden width
VALUE_HIDDEN = 50

# Search defaults
C_PUCT = 1.25
FPU = 0.0

# GTP budget per move, in milliseconds
MOVETIME = 1000

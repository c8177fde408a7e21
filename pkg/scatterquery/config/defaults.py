from yacs.config import CfgNode as CN

# -----------------------------------------------------------------------------
# Convention about the key names
# -----------------------------------------------------------------------------
# Short names used in run notes map onto the tree as
#   alpha -> SOLVER.ALPHA, lr -> SOLVER.BASE_LR, iters -> SOLVER.MAX_ITERS,
#   d -> MODEL.DIM, patch -> MODEL.PATCH_SIZE, layers -> MODEL.ENCODER_LAYERS,
#   seed -> SEED

CONFIG_VERSION = 1

# -----------------------------------------------------------------------------
# Config definition
# -----------------------------------------------------------------------------

_C = CN()
# Bumped whenever a key changes meaning; files with another version are rejected
_C.CONFIG_VERSION = CONFIG_VERSION
# Seed for model init and scene synthesis (--seed overrides it)
_C.SEED = 1234
# Where artifacts, manifests and logs go (--out overrides it)
_C.OUTPUT_DIR = './log'

# -----------------------------------------------------------------------------
# INPUT
# -----------------------------------------------------------------------------
_C.INPUT = CN()
# Boxcar window (odd) for the coherency estimate
_C.INPUT.WINDOW = 3
# Divide amplitudes by sqrt(mean SPAN) before training so the scene carries unit mean power
_C.INPUT.POWER_NORM = True

# -----------------------------------------------------------------------------
# SYNTH
# -----------------------------------------------------------------------------
_C.SYNTH = CN()
_C.SYNTH.HEIGHT = 32
_C.SYNTH.WIDTH = 32
# Region layout, options: 'single', 'halves', 'quadrants'
_C.SYNTH.LAYOUT = 'quadrants'
# One list of ten powers per region, ordered Surface, DoubleBounce, Volume, Helix,
# OrientedDipole, CompoundDipole, MixedDipole, RotatedDihedral, RollInvariantCrossPol, Adaptive
_C.SYNTH.REGION_POWERS = [
    [8.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 8.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.5, 0.5, 6.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.5, 0.0],
    [1.0, 1.0, 1.0, 4.0, 0.5, 0.0, 0.0, 0.5, 0.0, 0.0],
]
# Circular Gaussian speckle; False puts the principal Pauli vector of each target on every pixel
_C.SYNTH.SPECKLE = True
_C.SYNTH.SENSOR = 'synthetic'
# Pixel spacing in meters
_C.SYNTH.RESOLUTION = 8.0

# -----------------------------------------------------------------------------
# QUERIES
# -----------------------------------------------------------------------------
_C.QUERIES = CN()
# Sample pairs averaged per query
_C.QUERIES.NUM_SAMPLES = 64
# Frozen seed of the shipped queries, part of the query format version
_C.QUERIES.SEED = 20240607
_C.QUERIES.EMBED_DIM = 768
_C.QUERIES.QUERY_DIM = 256

# -----------------------------------------------------------------------------
# MODEL
# -----------------------------------------------------------------------------
_C.MODEL = CN()
# Name of the model in the factory
_C.MODEL.NAME = 'scattering_query'
# Feature dim d
_C.MODEL.DIM = 64
_C.MODEL.PATCH_SIZE = 4
_C.MODEL.ENCODER_LAYERS = 2
_C.MODEL.DECODER_LAYERS = 3
# Coefficients at or above this value keep a pixel open in the next attention mask
_C.MODEL.MASK_THRESHOLD = 0.5
# Scale of the patch embedding init relative to unit-power inputs
_C.MODEL.INIT_GAIN = 1.0

# -----------------------------------------------------------------------------
# Solver
# -----------------------------------------------------------------------------
_C.SOLVER = CN()
# Name of optimizer, only plain gradient descent is provided
_C.SOLVER.OPTIMIZER_NAME = 'GD'
# Weight of the power conservation loss
_C.SOLVER.ALPHA = 0.1
# Fixed learning rate
_C.SOLVER.BASE_LR = 1e-2
# Per-parameter gradient norm cap, 0 disables clipping
_C.SOLVER.CLIP_GRAD = 0.0
# Number of gradient steps
_C.SOLVER.MAX_ITERS = 500
# iteration of display training log
_C.SOLVER.LOG_PERIOD = 50
# iteration of saving checkpoint, 0 keeps only the final one
_C.SOLVER.CHECKPOINT_PERIOD = 0
# iteration of validation
_C.SOLVER.EVAL_PERIOD = 100
# Loss above this value (or non-finite) aborts training
_C.SOLVER.DIVERGENCE_LIMIT = 1e6

# -----------------------------------------------------------------------------
# TEST
# -----------------------------------------------------------------------------
_C.TEST = CN()
# Path to the trained checkpoint
_C.TEST.WEIGHT = ''
# Threshold on the Yamaguchi maps when scoring
_C.TEST.THRESHOLD = 0.5


def get_cfg_defaults():
    """Fresh copy of the defaults, safe to merge into."""
    return _C.clone()

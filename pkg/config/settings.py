"""
Configuration and settings for the feature-leveling toolkit.

Holds numeric defaults (gate distribution constants, optimizer
hyperparameters, initialization) and the data directory switch.

Note: Environment variables are loaded in app.py before this module is imported.
"""

import os

# Relative dataset paths resolve against this directory
DATA_DIR = os.getenv("FEATURE_LEVELING_DATA_DIR")

DEFAULT_LOG_LEVEL = "INFO"

# "fixed" keeps matmul bit-reproducible; "blas" trades that for speed
DEFAULT_MATMUL_BACKEND = "fixed"

# Hard-concrete distribution constants (temperature, stretch interval)
GATE_BETA = 2.0 / 3.0
GATE_GAMMA = -0.1
GATE_ZETA = 1.1

# Uniform noise is kept inside (eps, 1 - eps) so its logit stays finite
GATE_EPSILON = 1e-6

# Gates start almost fully open so training begins near the plain FCNN
DEFAULT_GATE_INIT = 2.3
DEFAULT_GATE_INIT_STD = 0.01

# Adam
DEFAULT_LR = 1e-3
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8

# After lr_decay_start, learning rates fall linearly to this fraction of their value
LR_DECAY_FLOOR = 0.01

# Lambda ramps linearly from 0 over this fraction of the run unless set
DEFAULT_WARMUP_FRACTION = 0.1

DEFAULT_BATCH_SIZE = 128
DEFAULT_EVAL_EVERY = 500

# Train/test ratio 4:1
TRAIN_FRACTION = 0.8

CHECKPOINT_VERSION = 1

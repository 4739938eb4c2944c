NUMTAPREP_LOGGER = "numtaprep"

TARGET_SIZE = 28
FIXED_LEVEL = 127
DARK_LEVEL = 127
TRAIN_FRAC = 0.85

BACKGROUND = 0
FOREGROUND = 255

DIGITS = tuple(range(10))

REPORT_SCHEMA = 1
MODEL_MAGIC = b'NPML'
MODEL_VERSION = 1

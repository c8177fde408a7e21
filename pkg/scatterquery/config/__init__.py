from .defaults import _C as cfg
from .defaults import CONFIG_VERSION, get_cfg_defaults

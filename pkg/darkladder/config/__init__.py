from .default import _C as cfg
from .default import get_cfg_defaults as get_cfg_defaults
from .default import update_config as update_config
from .default import validate_config as validate_config

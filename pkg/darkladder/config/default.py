#!/usr/bin/env python3

"""Default configuration tree.

Rates are MHz meaning value/2pi, durations are microseconds. Conversion to
rad/us happens once, in darkladder.utils.units.
"""

import logging
import os

import numpy as np
from yacs.config import CfgNode as CN

from darkladder.errors import ConfigError

logger = logging.getLogger(__name__)

_C = CN()

# Output folder for this experiment configuration.
_C.OUTPUT_DIR = "output/"
_C.SEED       = 1
# 0 means all available cores.
_C.THREADS    = 0
_C.STRICT     = False
_C.EMIT_PLOTS = False

# Physical parameters of the 3-level atom + cavity.
# Reference set: (kappa, gamma, g)/2pi = (1.5, 3.0, 10.2) MHz, gamma split evenly.
# Secondary set (FoM sweeps): g = 9.2, OMEGA12 = 0.3, OMEGA23 = 4.0, GAMMA_D = 0.13.
_C.SYSTEM = CN()

_C.SYSTEM.G           = 10.2
_C.SYSTEM.KAPPA       = 1.5
_C.SYSTEM.GAMMA13     = 1.5
_C.SYSTEM.GAMMA23     = 1.5
_C.SYSTEM.GAMMA_D     = 0.0
_C.SYSTEM.OMEGA12     = 0.4
_C.SYSTEM.OMEGA23     = 4.0
_C.SYSTEM.DELTA12     = 0.0
_C.SYSTEM.DELTA23     = 0.0
_C.SYSTEM.FOCK_CUTOFF = 5

# Detection chain. EFFICIENCY is used unless FROM_CHAIN is set.
_C.DETECTION = CN()

_C.DETECTION.OUTCOUPLING = 0.57
_C.DETECTION.DETECTOR    = 0.65
_C.DETECTION.FIBER       = 0.80
_C.DETECTION.PROPAGATION = 0.90
_C.DETECTION.EFFICIENCY  = 0.26
_C.DETECTION.FROM_CHAIN  = False

# Delta12 x Delta23 emission scan.
_C.SPECTROSCOPY = CN()

_C.SPECTROSCOPY.OBSERVABLE    = "emission_rate"
_C.SPECTROSCOPY.DELTA12_RANGE = [-15.0, 15.0]
_C.SPECTROSCOPY.DELTA12_STEPS = 61
_C.SPECTROSCOPY.DELTA23_RANGE = [-10.0, 10.0]
_C.SPECTROSCOPY.DELTA23_STEPS = 41
_C.SPECTROSCOPY.PROMINENCE    = 0.05
_C.SPECTROSCOPY.LOG_FLOOR     = 1e-6
_C.SPECTROSCOPY.TRUNCATION_CHECK = False

# g2(tau), fits, spectrum and the Omega23 sweep.
_C.CORRELATION = CN()

_C.CORRELATION.OMEGA23_LIST    = [2.0, 3.7]
_C.CORRELATION.TAU_MAX         = 20.0
_C.CORRELATION.TAU_STEPS       = 401
_C.CORRELATION.SWEEP_OMEGA23   = [1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 12.0]
_C.CORRELATION.SPECTRUM        = True
_C.CORRELATION.SPECTRUM_SPAN   = 15.0
_C.CORRELATION.SPECTRUM_STEPS  = 601
_C.CORRELATION.FWM_DELTA_1R    = 0.1
_C.CORRELATION.FWM_DELTA_2R    = 0.1
_C.CORRELATION.FWM_DELTA_23    = 0.2
_C.CORRELATION.COHERENT_SELFTEST = False
_C.CORRELATION.BACKEND         = "rk"

# Zeno factor table.
_C.ZENO = CN()

_C.ZENO.N_MAX        = 5
_C.ZENO.OMEGA23_LIST = [1.0, 9.2]

# 7-level Rb87 Monte-Carlo wavefunction ensemble.
_C.MONTECARLO = CN()

_C.MONTECARLO.N_TRAJ               = 2000
_C.MONTECARLO.T_MAX                = 60.0
_C.MONTECARLO.T_LONG               = 600.0
_C.MONTECARLO.DT_MAX               = 0.2
_C.MONTECARLO.RATE_BIN             = 2.0
_C.MONTECARLO.ZEEMAN_SHIFT         = 1.0
_C.MONTECARLO.PREPARATION_FIDELITY = 1.0
_C.MONTECARLO.FREE_SPACE           = True
_C.MONTECARLO.DELTA23_SCAN         = [-5.0, 5.0]
_C.MONTECARLO.DELTA23_STEPS        = 0
_C.MONTECARLO.WRITE_RECORDS        = True
# Empty string means the packaged rb87_d2_branching.yaml.
_C.MONTECARLO.BRANCHING_FILE       = ""
# Optional measured Delta23 curve (columns delta23, photons) for scale/offset fitting.
_C.MONTECARLO.EXPERIMENT_CSV       = ""

# Figure of merit <a^dag a>/<sigma33> sweeps.
_C.FOM = CN()

_C.FOM.VARIABLES     = ["g", "gamma33", "kappa", "gamma_d"]
_C.FOM.STEPS         = 20
_C.FOM.G_RANGE       = [2.0, 20.0]
_C.FOM.GAMMA33_RANGE = [0.5, 10.0]
_C.FOM.KAPPA_RANGE   = [0.5, 5.0]
_C.FOM.GAMMA_D_RANGE = [0.01, 1.0]

_C.SELFTEST = CN()

_C.SELFTEST.TOL   = 1e-10
_C.SELFTEST.N_MAX = 4


def get_cfg_defaults():
    """Get a yacs CfgNode object with default values for darkladder."""
    # Return a clone so that the defaults will not be altered
    return _C.clone()


def update_config(cfg, args):
    cfg.defrost()
    try:
        if getattr(args, "cfg", None):
            cfg.merge_from_file(args.cfg)
        if getattr(args, "opts", None):
            cfg.merge_from_list(args.opts)
    except KeyError as e:
        raise ConfigError(f"unknown key {e}") from e
    except (ValueError, AssertionError) as e:
        raise ConfigError(str(e)) from e
    except OSError as e:
        raise ConfigError(str(e), key=getattr(args, "cfg", None)) from e
    cfg.freeze()
    validate_config(cfg)


def _check_range(cfg, key):
    node, name = key.split(".")
    lo_hi = cfg[node][name]
    if len(lo_hi) != 2 or not np.all(np.isfinite(lo_hi)) or not lo_hi[0] < lo_hi[1]:
        raise ConfigError(f"expected increasing finite [lo, hi], got {list(lo_hi)}", key=key)


def validate_config(cfg):
    """Checks yacs cannot express. Raises ConfigError naming the key."""
    for name, value in cfg.SYSTEM.items():
        if name.startswith("DELTA"):
            continue
        if not np.isfinite(value) or value < 0:
            raise ConfigError(f"must be finite and >= 0, got {value}", key=f"SYSTEM.{name}")
    if cfg.SYSTEM.FOCK_CUTOFF < 1:
        raise ConfigError("must be >= 1", key="SYSTEM.FOCK_CUTOFF")

    for name in ("OUTCOUPLING", "DETECTOR", "FIBER", "PROPAGATION", "EFFICIENCY"):
        if not 0.0 <= cfg.DETECTION[name] <= 1.0:
            raise ConfigError("must lie in [0, 1]", key=f"DETECTION.{name}")
    if not 0.0 <= cfg.MONTECARLO.PREPARATION_FIDELITY <= 1.0:
        raise ConfigError("must lie in [0, 1]", key="MONTECARLO.PREPARATION_FIDELITY")

    for key in ("SPECTROSCOPY.DELTA12_RANGE", "SPECTROSCOPY.DELTA23_RANGE",
                "MONTECARLO.DELTA23_SCAN", "FOM.G_RANGE", "FOM.GAMMA33_RANGE",
                "FOM.KAPPA_RANGE", "FOM.GAMMA_D_RANGE"):
        _check_range(cfg, key)
    for key in ("SPECTROSCOPY.DELTA12_STEPS", "SPECTROSCOPY.DELTA23_STEPS",
                "CORRELATION.TAU_STEPS", "FOM.STEPS"):
        node, name = key.split(".")
        if cfg[node][name] < 1:
            raise ConfigError("grid must not be empty", key=key)
    if cfg.CORRELATION.TAU_STEPS < 20 or cfg.CORRELATION.TAU_MAX <= 0:
        raise ConfigError("need >= 20 points over a positive span", key="CORRELATION.TAU_STEPS")
    if cfg.SPECTROSCOPY.OBSERVABLE not in ("emission_rate", "g2_zero", "photon_number",
                                           "sigma33", "figure_of_merit"):
        raise ConfigError(f"unknown observable {cfg.SPECTROSCOPY.OBSERVABLE!r}",
                          key="SPECTROSCOPY.OBSERVABLE")
    if cfg.CORRELATION.BACKEND not in ("rk", "expm"):
        raise ConfigError("must be 'rk' or 'expm'", key="CORRELATION.BACKEND")

    sweep = np.asarray(cfg.CORRELATION.SWEEP_OMEGA23, dtype=float)
    if sweep.size and (not np.all(np.isfinite(sweep)) or np.any(np.diff(sweep) <= 0)):
        raise ConfigError("must be strictly increasing", key="CORRELATION.SWEEP_OMEGA23")

    for name in cfg.FOM.VARIABLES:
        if name not in ("g", "gamma33", "kappa", "gamma_d"):
            raise ConfigError(f"unknown sweep variable {name!r}", key="FOM.VARIABLES")

    if cfg.MONTECARLO.N_TRAJ < 1:
        raise ConfigError("must be >= 1", key="MONTECARLO.N_TRAJ")
    if cfg.MONTECARLO.T_MAX <= 0 or cfg.MONTECARLO.DT_MAX <= 0:
        raise ConfigError("durations must be positive", key="MONTECARLO.T_MAX")
    if cfg.MONTECARLO.T_LONG < cfg.MONTECARLO.T_MAX:
        raise ConfigError("must be >= MONTECARLO.T_MAX", key="MONTECARLO.T_LONG")
    if cfg.MONTECARLO.RATE_BIN <= 0:
        raise ConfigError("must be positive", key="MONTECARLO.RATE_BIN")
    if cfg.MONTECARLO.DELTA23_STEPS < 0:
        raise ConfigError("must be >= 0", key="MONTECARLO.DELTA23_STEPS")

    out_dir = os.path.abspath(cfg.OUTPUT_DIR)
    parent = out_dir
    while not os.path.exists(parent):
        parent = os.path.dirname(parent)
    if not os.access(parent, os.W_OK):
        raise ConfigError(f"{out_dir} is not creatable", key="OUTPUT_DIR")

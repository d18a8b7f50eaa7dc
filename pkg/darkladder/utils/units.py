#!/usr/bin/env python3

"""Human units (MHz meaning value/2pi, us) to internal angular units (rad/us)."""

import numpy as np

from darkladder.errors import ParameterError
from darkladder.model.system import SystemParams

TWO_PI = 2 * np.pi


def mhz_to_rad_us(value):
    return TWO_PI * np.asarray(value, dtype=float) if np.ndim(value) else TWO_PI * float(value)


def rad_us_to_mhz(value):
    return np.asarray(value, dtype=float) / TWO_PI if np.ndim(value) else float(value) / TWO_PI


def params_from_cfg(cfg, **overrides_mhz):
    """SystemParams from the SYSTEM node, optional overrides in MHz by field name."""
    s = cfg.SYSTEM
    mhz = dict(
        g=s.G,
        kappa=s.KAPPA,
        gamma13=s.GAMMA13,
        gamma23=s.GAMMA23,
        gamma_d=s.GAMMA_D,
        omega12=s.OMEGA12,
        omega23=s.OMEGA23,
        delta12=s.DELTA12,
        delta23=s.DELTA23,
    )
    mhz.update(overrides_mhz)
    return SystemParams(fock_cutoff=s.FOCK_CUTOFF, **{k: mhz_to_rad_us(v) for k, v in mhz.items()})


def detection_efficiency(outcoupling=0.57, detector=0.65, fiber=0.80, propagation=0.90):
    """Net probability that a photon leaving the cavity mode is detected."""
    factors = (outcoupling, detector, fiber, propagation)
    if any(not 0.0 <= f <= 1.0 for f in factors):
        raise ParameterError(f"efficiency factors must lie in [0, 1], got {factors}")
    return float(np.prod(factors))


def efficiency_from_cfg(cfg):
    d = cfg.DETECTION
    if d.FROM_CHAIN:
        return detection_efficiency(d.OUTCOUPLING, d.DETECTOR, d.FIBER, d.PROPAGATION)
    return float(d.EFFICIENCY)

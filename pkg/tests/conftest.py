import numpy as np
import pytest

from darkladder.config import get_cfg_defaults
from darkladder.model.system import SystemParams, build_driven_cavity
from darkladder.utils.units import mhz_to_rad_us


def mhz_params(fock_cutoff=5, **mhz):
    """SystemParams from MHz keyword values."""
    return SystemParams(fock_cutoff=fock_cutoff, **{k: mhz_to_rad_us(v) for k, v in mhz.items()})


@pytest.fixture
def reference_params():
    """(kappa, gamma, g)/2pi = (1.5, 3.0, 10.2) MHz, Omega12 0.4, Omega23 4.0."""
    return mhz_params(g=10.2, kappa=1.5, gamma13=1.5, gamma23=1.5, omega12=0.4, omega23=4.0)


@pytest.fixture
def correlation_params():
    """g/2pi = 9.2 MHz, Omega12 0.3, Omega23 2.0, on resonance."""
    return mhz_params(g=9.2, kappa=1.5, gamma13=1.5, gamma23=1.5, omega12=0.3, omega23=2.0)


@pytest.fixture
def fom_params():
    return mhz_params(g=9.2, kappa=1.5, gamma13=1.5, gamma23=1.5, gamma_d=0.13,
                      omega12=0.3, omega23=4.0)


@pytest.fixture
def driven_cavity():
    delta, epsilon, kappa = 0.3, 0.5, 1.0
    return build_driven_cavity(delta, epsilon, kappa, fock_cutoff=12), (delta, epsilon, kappa)


@pytest.fixture
def cfg(tmp_path):
    c = get_cfg_defaults()
    c.OUTPUT_DIR = str(tmp_path / "out")
    c.THREADS = 1
    return c


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def rb87_params():
    """Monte-Carlo set as in configs/montecarlo_rb87.yaml: |3> decays 1/2, 1/3, 1/6 of 3.0 MHz."""
    return mhz_params(fock_cutoff=3, g=10.2, kappa=1.5, gamma13=1.5, gamma23=1.0,
                      omega12=0.4, omega23=4.0)

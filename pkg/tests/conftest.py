import math

import numpy as np
import pytest

from ringtx import defaults
from ringtx.device import ElectroOpticResponse, RingConfig
from ringtx.ring import find_resonance


@pytest.fixture(scope="session")
def default_three():
    return defaults.default_setup(defaults.THREE_SEGMENT)


@pytest.fixture(scope="session")
def default_two():
    return defaults.default_setup(defaults.TWO_SEGMENT)


@pytest.fixture(scope="session")
def lambda_res(default_three):
    cfg, resp = default_three
    info = find_resonance(cfg, resp, (0.0, 0.0, 0.0), (1313.7, 1314.7))
    return info.lambda_res_nm


def linear_response(lambda_ref=1310.0, v_max=4.0, dn_per_v=5e-5, alpha0=10.0):
    """Simple strictly-linear test table (easy hand arithmetic)."""
    rows = []
    for i in range(5):
        v = v_max * i / 4
        rows.append((v, dn_per_v * v, alpha0 - 0.5 * i))
    return ElectroOpticResponse(rows=tuple(rows), lambda_ref_nm=lambda_ref)


def lossless_response(lambda_ref=1310.0):
    rows = ((0.0, 0.0, 0.0), (2.0, 1e-4, 0.0), (4.0, 2e-4, 0.0))
    return ElectroOpticResponse(rows=rows, lambda_ref_nm=lambda_ref)


def simple_ring(n_segments=3, sigma=0.95, passive_alpha=2.0, n_eff=2.5, n_g=4.2):
    if n_segments == 3:
        segs = (("s1", 0.2), ("s2", 0.2), ("s3", 0.2))
    else:
        segs = (("msb", 0.6 * 1.9 / 2.9), ("lsb", 0.6 / 2.9))
    return RingConfig(
        radius_um=10.0,
        segments=segs,
        passive_n_eff=n_eff,
        group_index=n_g,
        passive_alpha_db_cm=passive_alpha,
        self_coupling=sigma,
    )

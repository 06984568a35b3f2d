import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringtx.datapath import (
    SWING_BASE_VPP,
    SWING_MAX_VPP,
    DriverConfig,
    LutConfig,
    PrbsConfig,
    Waveform,
    bits_to_words,
    code_for_swing,
    deserialize,
    drive_waveform,
    encode_pam4,
    pam4_segment_bits,
    prbs_sequence,
    serialize,
    serialize_lanes,
    swing_for_code,
)


def reference_lfsr(order, taps, seed, n):
    """Straightforward shift-register model used as an oracle."""
    reg = [(seed >> i) & 1 for i in range(order)]  # reg[i] = bit i+1
    out = []
    for _ in range(n):
        fb = reg[taps[0] - 1] ^ reg[taps[1] - 1]
        out.append(fb)
        reg = [fb] + reg[:-1]
    return out


def test_prbs7_period_and_balance():
    cfg = PrbsConfig(order=7)
    bits = prbs_sequence(cfg, 2 * cfg.period)
    assert np.array_equal(bits[: cfg.period], bits[cfg.period :])
    one_period = bits[: cfg.period]
    assert one_period.sum() == 64
    assert cfg.period - one_period.sum() == 63
    # no shorter period
    for p in (31, 63):
        assert not np.array_equal(one_period[:p], one_period[p : 2 * p])


def test_prbs_matches_reference_lfsr():
    cfg = PrbsConfig(order=7)  # all-ones seed
    bits = prbs_sequence(cfg, 16)
    ref = reference_lfsr(7, (7, 6), cfg.seed, 16)
    assert bits.tolist() == ref
    cfg15 = PrbsConfig(order=15, seed=0x1234)
    assert prbs_sequence(cfg15, 32).tolist() == reference_lfsr(
        15, (15, 14), 0x1234, 32
    )


def test_prbs15_and_31_periods():
    cfg = PrbsConfig(order=15)
    bits = prbs_sequence(cfg, cfg.period + 100)
    assert np.array_equal(bits[: 100], bits[cfg.period : cfg.period + 100])
    assert bits[: cfg.period].sum() == 2**14


def test_prbs_autocorrelation():
    cfg = PrbsConfig(order=7)
    period = cfg.period
    s = 1.0 - 2.0 * prbs_sequence(cfg, period).astype(float)
    for lag in (1, 5, 50):
        rolled = np.roll(s, lag)
        corr = float(np.dot(s, rolled)) / period
        assert corr == pytest.approx(-1.0 / period, abs=1e-12)


def test_prbs_argument_errors():
    with pytest.raises(ValueError, match="nonzero"):
        PrbsConfig(order=7, seed=0)
    with pytest.raises(ValueError, match="order"):
        PrbsConfig(order=9)
    with pytest.raises(ValueError, match="fit"):
        PrbsConfig(order=7, seed=1 << 7)
    with pytest.raises(ValueError, match="at least one"):
        prbs_sequence(PrbsConfig(order=7), 0)


def test_prbs_deterministic_given_seed():
    a = prbs_sequence(PrbsConfig(order=7, seed=0x2B), 256)
    b = prbs_sequence(PrbsConfig(order=7, seed=0x2B), 256)
    assert np.array_equal(a, b)
    c = prbs_sequence(PrbsConfig(order=7, seed=0x2C), 256)
    assert not np.array_equal(a, c)


def test_lut_thermometer_encoding():
    lut = LutConfig.pam4()
    assert encode_pam4(0, 0, lut) == (0, 0, 0)
    assert encode_pam4(0, 1, lut) == (1, 0, 0)
    assert encode_pam4(1, 0, lut) == (1, 1, 0)
    assert encode_pam4(1, 1, lut) == (1, 1, 1)
    for msb in (0, 1):
        for lsb in (0, 1):
            s1, s2, s3 = encode_pam4(msb, lsb, lut)
            assert s1 + s2 + s3 == 2 * msb + lsb
            assert s1 >= s2 >= s3  # prefix property


def test_lut_validation():
    with pytest.raises(ValueError, match="identical"):
        LutConfig(mode="nrz", tables=((0, 0, 1, 1), (0, 1, 1, 1), (0, 0, 1, 1)))
    with pytest.raises(ValueError, match="thermometer"):
        LutConfig(mode="pam4", tables=((0, 0, 1, 1), (0, 1, 0, 1), (0, 0, 0, 1)))
    with pytest.raises(ValueError, match="mode"):
        LutConfig(mode="pam8")
    nrz = LutConfig.nrz()
    assert nrz.tables[0] == nrz.tables[1] == nrz.tables[2]
    with pytest.raises(ValueError, match="PAM4-mode"):
        encode_pam4(0, 1, nrz)


def test_serialize_lanes_round_robin():
    lanes = [[10] * 3, [20] * 3, [30] * 3, [40] * 3]
    out = serialize_lanes(lanes)
    assert out.tolist() == [10, 20, 30, 40] * 3
    with pytest.raises(ValueError, match="lanes"):
        serialize_lanes([[1], [2], [3]])
    with pytest.raises(ValueError, match="equal length"):
        serialize_lanes([[1], [2], [3], [4, 5]])


def test_serialize_hand_example():
    # two symbols per word: even positions feed MSB, odd feed LSB
    words = np.array(
        [
            [1, 0, 0, 1, 1, 1, 0, 0],
            [0, 1, 1, 0, 0, 0, 1, 1],
        ]
    )
    msb, lsb = serialize(np.repeat(words, 2, axis=0)[:4])
    # first word contributes symbols (1,0), (0,1), (1,1), (0,0)
    assert msb[:4].tolist() == [1, 0, 1, 0]
    assert lsb[:4].tolist() == [0, 1, 1, 0]


def test_serialize_argument_errors():
    with pytest.raises(ValueError, match="N x 8"):
        serialize(np.zeros((4, 7), dtype=int))
    with pytest.raises(ValueError, match="multiple"):
        serialize(np.zeros((3, 8), dtype=int))
    with pytest.raises(ValueError, match="lanes"):
        serialize(np.zeros((4, 8), dtype=int), lanes=2)
    with pytest.raises(ValueError, match="multiple"):
        deserialize(np.zeros(6, dtype=int), np.zeros(6, dtype=int))
    with pytest.raises(ValueError, match="equal-length"):
        deserialize(np.zeros(8, dtype=int), np.zeros(4, dtype=int))


@settings(max_examples=50)
@given(st.integers(1, 64), st.integers(0, 2**32 - 1))
def test_serialize_deserialize_identity(nwords4, seed):
    rng = np.random.default_rng(seed)
    words = rng.integers(0, 2, size=(4 * nwords4, 8))
    msb, lsb = serialize(words)
    assert np.array_equal(deserialize(msb, lsb), words)


def test_bits_to_words():
    words = bits_to_words(np.arange(16) % 2)
    assert words.shape == (2, 8)
    with pytest.raises(ValueError, match="multiple"):
        bits_to_words(np.zeros(10, dtype=int))


def test_swing_mapping_monotone_and_clamped():
    swings = [swing_for_code(c) for c in range(16)]
    assert swings[0] == SWING_BASE_VPP
    assert all(b >= a for a, b in zip(swings, swings[1:]))
    assert all(SWING_BASE_VPP <= s <= SWING_MAX_VPP for s in swings)
    assert swings[-1] == SWING_MAX_VPP
    # nominal step below the clamp
    assert swings[1] - swings[0] == pytest.approx(0.206, abs=1e-12)
    with pytest.raises(ValueError):
        swing_for_code(16)
    with pytest.raises(ValueError):
        swing_for_code(-1)


def test_code_for_swing_nearest():
    assert code_for_swing(1.32) == 0
    assert code_for_swing(2.0) == 3
    assert code_for_swing(10.0) == code_for_swing(3.2)
    realized = swing_for_code(code_for_swing(2.35))
    assert abs(realized - 2.35) <= 0.103  # within half a step


def test_driver_config_swing():
    drv = DriverConfig(sw_p=3, sw_n=3, bandwidth_ghz=40.0)
    assert drv.swing_vpp == pytest.approx(1.32 + 3 * 0.206, abs=1e-12)
    asym = DriverConfig(sw_p=2, sw_n=4, bandwidth_ghz=40.0)
    assert asym.swing_vpp == pytest.approx(drv.swing_vpp, abs=1e-12)
    with pytest.raises(ValueError):
        DriverConfig(sw_p=0, sw_n=0, bandwidth_ghz=0.0)


def test_waveform_validation():
    with pytest.raises(ValueError, match="sample_rate"):
        Waveform(ui_ps=31.25, sample_rate=4, traces=np.zeros((3, 64)))
    with pytest.raises(ValueError, match="ui_ps"):
        Waveform(ui_ps=0.0, sample_rate=16, traces=np.zeros((3, 64)))
    w = Waveform(ui_ps=31.25, sample_rate=16, traces=np.zeros((3, 64)))
    assert w.n_segments == 3
    assert w.t_ps[1] - w.t_ps[0] == pytest.approx(31.25 / 16)


def test_drive_waveform_wide_bandwidth_is_ideal():
    bits = np.array([0, 1, 1, 0, 1, 0, 0, 1])
    drv = DriverConfig(sw_p=0, sw_n=0, bandwidth_ghz=1e6)
    wave = drive_waveform([bits], drv, ui_ps=31.25, sample_rate=16)
    ideal = np.repeat(bits.astype(float) * drv.swing_vpp, 16)
    assert np.max(np.abs(wave.traces[0] - ideal)) < 1e-6
    assert drv.swing_vpp == pytest.approx(1.32, abs=1e-12)


def test_drive_waveform_step_response_time_constant():
    # choose bandwidth so tau is an integer number of samples: tau = 20 dt
    sample_rate = 16
    ui_ps = 16.0  # dt = 1 ps
    bw_ghz = 1e3 / (2 * math.pi * 20.0)
    bits = np.array([0] * 4 + [1] * 60)
    drv = DriverConfig(sw_p=0, sw_n=0, bandwidth_ghz=bw_ghz)
    wave = drive_waveform([bits], drv, ui_ps=ui_ps, sample_rate=sample_rate)
    trace = wave.traces[0]
    step_at = 4 * sample_rate  # first sample at swing
    val = trace[step_at + 19]  # 20 samples after the step = one tau later
    assert val / drv.swing_vpp == pytest.approx(1 - math.exp(-1), abs=1e-9)


def test_drive_waveform_per_segment_drivers():
    bits = [np.array([0, 1] * 8), np.array([1, 0] * 8), np.array([1, 1] * 8)]
    drivers = [
        DriverConfig(sw_p=0, sw_n=0, bandwidth_ghz=1e6),
        DriverConfig(sw_p=15, sw_n=15, bandwidth_ghz=1e6),
        DriverConfig(sw_p=3, sw_n=3, bandwidth_ghz=1e6),
    ]
    wave = drive_waveform(bits, drivers, ui_ps=31.25, sample_rate=8)
    assert wave.traces[0].max() == pytest.approx(1.32, abs=1e-9)
    assert wave.traces[1].max() == pytest.approx(3.2, abs=1e-9)
    with pytest.raises(ValueError, match="equal length"):
        drive_waveform([bits[0], bits[1][:4]], drivers[0], 31.25, 8)
    with pytest.raises(ValueError, match="per segment"):
        drive_waveform(bits, drivers[:2], 31.25, 8)


def test_pam4_segment_bits_prefix_property():
    rng = np.random.default_rng(5)
    msb = rng.integers(0, 2, 64)
    lsb = rng.integers(0, 2, 64)
    s1, s2, s3 = pam4_segment_bits(msb, lsb, LutConfig.pam4())
    assert np.all(s1 >= s2)
    assert np.all(s2 >= s3)
    assert np.array_equal(s1 + s2 + s3, 2 * msb + lsb)

import numpy as np
import pytest

from ringtx.datapath import (
    DriverConfig,
    LutConfig,
    PrbsConfig,
    Waveform,
    bits_to_words,
    drive_waveform,
    pam4_segment_bits,
    prbs_sequence,
    serialize,
)
from ringtx.errors import InsufficientDataError
from ringtx.eye import eye_metrics, fold_eye, optical_trace, raster_to_pgm
from ringtx.pam import PamLevels, ThermometerEncoding, levels_for, rlm


SR = 16
UI_PS = 31.25


def make_symbol_stream(n_symbols, seed=None):
    cfg = PrbsConfig(order=7, seed=seed)
    bits = prbs_sequence(cfg, 2 * n_symbols)
    msb, lsb = serialize(bits_to_words(bits))
    codes = 2 * msb.astype(np.int64) + lsb.astype(np.int64)
    return msb, lsb, codes


def make_wave(msb, lsb, voltages, bandwidth_ghz):
    seg_bits = pam4_segment_bits(msb, lsb, LutConfig.pam4())
    # swing codes are bypassed here: scale unit bits by the target voltage
    traces = []
    for bits, v in zip(seg_bits, voltages):
        drv = DriverConfig(sw_p=0, sw_n=0, bandwidth_ghz=bandwidth_ghz)
        w = drive_waveform([bits], drv, UI_PS, SR)
        traces.append(w.traces[0] * (v / drv.swing_vpp))
    return Waveform(ui_ps=UI_PS, sample_rate=SR, traces=np.array(traces))


def test_constant_drive_trace_matches_static_levels(default_three, lambda_res):
    cfg, resp = default_three
    lam = lambda_res - 0.010
    enc = ThermometerEncoding(2.0, 1.8, 1.9)
    levels = levels_for(cfg, resp, lam, enc)
    for code in range(4):
        drive = enc.drive_for(code)
        traces = np.tile(np.array(drive)[:, None], (1, 8 * SR))
        wave = Waveform(ui_ps=UI_PS, sample_rate=SR, traces=traces)
        trace = optical_trace(wave, cfg, resp, lam)
        assert np.max(np.abs(trace - levels.as_tuple()[code])) < 1e-12


def test_zero_drive_trace_is_p0(default_three, lambda_res):
    cfg, resp = default_three
    lam = lambda_res - 0.010
    wave = Waveform(ui_ps=UI_PS, sample_rate=SR, traces=np.zeros((3, 4 * SR)))
    trace = optical_trace(wave, cfg, resp, lam)
    p0 = levels_for(cfg, resp, lam, ThermometerEncoding(2.0, 2.0, 2.0)).p0
    assert np.max(np.abs(trace - p0)) < 1e-12


def test_alternating_pattern_plateaus(default_three, lambda_res):
    cfg, resp = default_three
    lam = lambda_res - 0.010
    n = 64
    msb = np.tile([0, 1], n // 2)
    lsb = msb.copy()  # alternates code 0 <-> 3
    wave = make_wave(msb, lsb, (2.0, 1.8, 1.9), bandwidth_ghz=1e5)
    trace = optical_trace(wave, cfg, resp, lam)
    levels = levels_for(cfg, resp, lam, ThermometerEncoding(2.0, 1.8, 1.9))
    per_ui = trace.reshape(n, SR)[:, SR // 2]
    lo = per_ui[msb == 0]
    hi = per_ui[msb == 1]
    assert np.max(np.abs(lo - levels.p0)) < 1e-9
    assert np.max(np.abs(hi - levels.p3)) < 1e-9


def test_segment_count_mismatch(default_two, lambda_res):
    cfg, resp = default_two
    wave = Waveform(ui_ps=UI_PS, sample_rate=SR, traces=np.zeros((3, 4 * SR)))
    with pytest.raises(ValueError, match="segments"):
        optical_trace(wave, cfg, resp, lambda_res)


def test_fold_eye_conservation_and_shape():
    rng = np.random.default_rng(0)
    trace = rng.uniform(0, 1, size=6 * SR)
    raster = fold_eye(trace, UI_PS, SR, power_bins=64)
    assert raster.counts.shape == (64, 2 * SR)
    assert raster.total_counts() == trace.size


def test_fold_eye_constant_trace_single_row():
    trace = np.full(8 * SR, 0.42)
    raster = fold_eye(trace, UI_PS, SR, power_bins=100)
    rows = np.nonzero(raster.counts.sum(axis=1))[0]
    assert rows.size == 1
    assert rows[0] == int(0.42 * 100)


def test_fold_eye_periodic_crop_invariance():
    base = np.concatenate([np.linspace(0, 1, SR), np.linspace(1, 0, SR)])
    trace = np.tile(base, 8)  # period = 2 UI
    r1 = fold_eye(trace[: 2 * (2 * SR)], UI_PS, SR)  # 2 periods
    r2 = fold_eye(trace[: 8 * (2 * SR)], UI_PS, SR)  # 8 periods
    assert np.array_equal(r2.counts, 4 * r1.counts)


def test_fold_eye_too_short():
    with pytest.raises(ValueError, match="4 UI"):
        fold_eye(np.zeros(3 * SR), UI_PS, SR)


def test_raster_to_pgm_format():
    trace = np.full(4 * SR, 0.5)
    raster = fold_eye(trace, UI_PS, SR, power_bins=8)
    pgm = raster_to_pgm(raster)
    lines = pgm.strip().split("\n")
    assert lines[0] == "P2"
    assert lines[1] == f"{2 * SR} 8"
    assert lines[2] == "255"
    assert len(lines) == 3 + 8


def test_eye_metrics_match_static_at_high_bandwidth(default_three, lambda_res):
    cfg, resp = default_three
    lam = lambda_res - 0.010
    volts = (2.0, 1.8, 1.9)
    msb, lsb, codes = make_symbol_stream(1024)
    wave = make_wave(msb, lsb, volts, bandwidth_ghz=1e6)
    trace = optical_trace(wave, cfg, resp, lam)
    metrics = eye_metrics(trace, codes, SR)
    static = rlm(levels_for(cfg, resp, lam, ThermometerEncoding(*volts)))
    assert metrics.dynamic_rlm == pytest.approx(static, abs=1e-9)
    assert all(s < 1e-9 for s in metrics.level_stds)
    levels = levels_for(cfg, resp, lam, ThermometerEncoding(*volts))
    for mean, p in zip(metrics.level_means, levels.as_tuple()):
        assert mean == pytest.approx(p, abs=1e-9)


def test_eye_metrics_monotone_means_and_heights(default_three, lambda_res):
    cfg, resp = default_three
    lam = lambda_res - 0.010
    msb, lsb, codes = make_symbol_stream(1024)
    wave = make_wave(msb, lsb, (2.0, 1.8, 1.9), bandwidth_ghz=40.0)
    trace = optical_trace(wave, cfg, resp, lam)
    metrics = eye_metrics(trace, codes, SR)
    means = metrics.level_means
    assert means[0] < means[1] < means[2] < means[3]
    assert all(g > 0 for g in metrics.gaps)
    assert all(h <= g for h, g in zip(metrics.eye_heights, metrics.gaps))
    assert 0.0 < metrics.dynamic_rlm <= 1.0


def test_eye_metrics_insufficient_data(default_three, lambda_res):
    cfg, resp = default_three
    lam = lambda_res - 0.010
    n = 256
    codes = np.zeros(n, dtype=int)  # all-identical symbols: levels 1..3 missing
    wave = Waveform(ui_ps=UI_PS, sample_rate=SR, traces=np.zeros((3, n * SR)))
    trace = optical_trace(wave, cfg, resp, lam)
    with pytest.raises(InsufficientDataError, match="level 1"):
        eye_metrics(trace, codes, SR)
    with pytest.raises(ValueError, match="symbols"):
        eye_metrics(trace[:-1], codes, SR)


def test_eye_metrics_window_validation(default_three, lambda_res):
    cfg, resp = default_three
    msb, lsb, codes = make_symbol_stream(256)
    wave = make_wave(msb, lsb, (2.0, 2.0, 2.0), bandwidth_ghz=1e5)
    trace = optical_trace(wave, cfg, resp, lambda_res - 0.01)
    with pytest.raises(ValueError, match="window_fraction"):
        eye_metrics(trace, codes, SR, window_fraction=0.0)
    m_narrow = eye_metrics(trace, codes, SR, window_fraction=0.125)
    m_wide = eye_metrics(trace, codes, SR, window_fraction=1.0)
    assert sum(m_wide.level_counts) == trace.size
    assert sum(m_narrow.level_counts) < sum(m_wide.level_counts)

"""Device models: UART arithmetic, rate curves, calibration solver."""

import math

import pytest

from hetnet154 import errors
from hetnet154.devices import (CalibrationConstraints, calibrate,
                               dump_profiles, load_profiles, parse_profiles,
                               rx_service_time, tx_interval, tx_pps,
                               uart_drain_time, with_restart_disabled)
from hetnet154.platforms import PLATFORMS, PlatformId, rx_host_bytes

SWEEP = range(6, 97)


def test_uart_drain_examples():
    assert uart_drain_time(113, 38400) == pytest.approx(0.029427, abs=1e-6)
    assert uart_drain_time(0, 38400) == 0.0
    assert uart_drain_time(384, 38400) == pytest.approx(0.1, abs=1e-12)


def test_uart_drain_is_linear():
    for a in (0, 1, 17, 100):
        for b in (0, 5, 38):
            assert uart_drain_time(a + b) == pytest.approx(
                uart_drain_time(a) + uart_drain_time(b), abs=1e-15)


def test_uart_drain_validates_inputs():
    with pytest.raises(ValueError):
        uart_drain_time(10, 0)
    with pytest.raises(ValueError):
        uart_drain_time(-1)


def test_default_profiles_load_and_expose_caps(pset):
    assert set(pset.profiles) == set(PLATFORMS)
    assert pset[PlatformId.TELOSB].caps.max_payload == 128
    for p in PLATFORMS:
        prof = pset[p]
        assert prof.sensitivity_dbm < prof.tx_power_dbm


def test_pps_non_increasing_in_payload(pset):
    for p in PLATFORMS:
        prof = pset[p]
        rates = [tx_pps(prof, size) for size in SWEEP]
        assert all(a >= b for a, b in zip(rates, rates[1:]))


def test_sunspot_rate_constant(pset):
    prof = pset[PlatformId.SUNSPOT]
    assert prof.tx.t_byte_s == 0.0
    assert tx_pps(prof, 6) == tx_pps(prof, 96)


def test_telosb_sunspot_ratio_within_band(pset):
    tel, sun = pset[PlatformId.TELOSB], pset[PlatformId.SUNSPOT]
    for size in SWEEP:
        ratio = tx_pps(tel, size) / tx_pps(sun, size)
        assert 1.7 <= ratio <= 2.3


def test_isense_strictly_fastest(pset):
    ise = pset[PlatformId.ISENSE]
    for size in SWEEP:
        fastest = tx_pps(ise, size)
        for p in PLATFORMS:
            if p != PlatformId.ISENSE:
                assert fastest > tx_pps(pset[p], size)


def test_tx_interval_rejects_oversized_payload(pset):
    with pytest.raises(errors.PayloadTooLarge):
        tx_interval(pset[PlatformId.ARDUINO_XBEE], 99)


def test_arduino_service_is_uart_drain(pset):
    prof = pset[PlatformId.ARDUINO_XBEE]
    for payload in (0, 28, 96):
        env = rx_host_bytes(PlatformId.ARDUINO_XBEE, payload)
        assert rx_service_time(prof, env) == pytest.approx(
            uart_drain_time(env), abs=1e-12)
    # The 28-byte envelope drains in about 10 ms: ~100 pps sustainable.
    drained = rx_service_time(prof, rx_host_bytes(PlatformId.ARDUINO_XBEE, 28))
    assert 1.0 / drained == pytest.approx(98.5, abs=1.0)


def test_arduino_decline_onset_near_28_bytes(pset):
    ard, tel = pset[PlatformId.ARDUINO_XBEE], pset[PlatformId.TELOSB]
    onset = None
    for payload in SWEEP:
        service = rx_service_time(
            ard, rx_host_bytes(PlatformId.ARDUINO_XBEE, payload))
        if service > tx_interval(tel, payload):
            onset = payload
            break
    assert onset is not None and abs(onset - 28) <= 2


def test_fast_receivers_never_bottleneck(pset):
    # iSense and TelosB service everything the fastest sender can emit.
    fastest_interval = min(tx_interval(pset[p], 6) for p in PLATFORMS)
    for p in (PlatformId.ISENSE, PlatformId.TELOSB):
        for payload in (6, 96):
            assert rx_service_time(pset[p], rx_host_bytes(p, payload)) \
                < fastest_interval


def test_calibrate_reproduces_the_shipped_profiles(pset):
    solved = calibrate().profile_set
    assert dump_profiles(solved) == dump_profiles(pset)


def test_calibrate_report_lists_choices():
    report = calibrate().report
    assert "link budget" in report and "ok:" in report


def test_calibrate_exact_ratio_halves_the_base(pset):
    res = calibrate(CalibrationConstraints(telosb_sunspot_ratio=(2.0, 2.0)))
    prof = res.profile_set
    tel, sun = prof[PlatformId.TELOSB], prof[PlatformId.SUNSPOT]
    assert tel.tx.t_byte_s == 0.0
    assert tel.tx.t_base_s == pytest.approx(sun.tx.t_base_s / 2.0, rel=1e-9)
    for size in (6, 50, 96):
        assert tx_pps(tel, size) / tx_pps(sun, size) == pytest.approx(2.0)


def test_calibrate_contradiction_is_infeasible():
    with pytest.raises(errors.Infeasible):
        calibrate(CalibrationConstraints(fastest=PlatformId.ISENSE,
                                         slowest=PlatformId.ISENSE))


def test_profile_round_trip(pset):
    text = dump_profiles(pset)
    again = parse_profiles(text)
    assert dump_profiles(again) == text
    assert again[PlatformId.ARDUINO_XBEE].rx.restart_threshold_pps == 150
    assert again[PlatformId.SUNSPOT].rx.restart_threshold_pps is None
    assert again.path_loss == pset.path_loss


def test_load_profiles_missing_file(tmp_path):
    with pytest.raises(errors.ProfileLoadError):
        load_profiles(tmp_path / "nope.ini")


def test_parse_profiles_rejects_truncated(pset):
    text = dump_profiles(pset)
    broken = text.replace("[telosb]", "[telosc]")
    with pytest.raises(errors.ProfileLoadError):
        parse_profiles(broken)


def test_restart_ablation_helper(pset):
    ablated = with_restart_disabled(pset)
    assert ablated[PlatformId.ARDUINO_XBEE].rx.restart_threshold_pps is None
    assert pset[PlatformId.ARDUINO_XBEE].rx.restart_threshold_pps == 150


def test_profile_invariant_enforced(pset):
    prof = pset[PlatformId.TELOSB]
    with pytest.raises(ValueError):
        import dataclasses
        dataclasses.replace(prof, sensitivity_dbm=prof.tx_power_dbm + 1)


def test_buffer_default_sizes(pset):
    assert pset[PlatformId.SUNSPOT].rx.buffer_packets == 32
    assert math.isclose(pset[PlatformId.ARDUINO_XBEE].rx.restart_duration_s, 1.0)

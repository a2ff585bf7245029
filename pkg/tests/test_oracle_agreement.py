"""Event-driven kernels vs the brute-force per-packet oracle.

Randomized micro-scenarios (at most 20 beacons, buffers at most 2) must
agree packet for packet: same accept/drop decision and the same drop
category for every (beacon, receiver), plus identical counters and RSSI
sums.
"""

import random

from bruteforce_sim import run_lane_bruteforce

from hetnet154 import engine


def random_micro_args(rng):
    n_rx = rng.randrange(1, 5)
    n_beacons = rng.randrange(1, 21)
    interval_ns = rng.randrange(1_000, 5_000_000)

    def col(fn):
        return [fn() for _ in range(n_rx)]

    return dict(
        n_beacons=n_beacons,
        interval_ns=interval_ns,
        mean_dbm=col(lambda: rng.uniform(-95.0, -40.0)),
        sigma_db=col(lambda: rng.choice([0.0, 0.0, 1.5, 6.0])),
        sensitivity_dbm=col(lambda: rng.uniform(-92.0, -50.0)),
        margin_db=col(lambda: rng.uniform(0.5, 6.0)),
        rssi_offset=col(lambda: -45.0),
        rssi_bias=col(lambda: rng.choice([0.0, -3.0, 2.0])),
        rssi_mode=col(lambda: rng.randrange(3)),
        service_ns=col(lambda: rng.randrange(500, 8_000_000)),
        buffer_cap=col(lambda: rng.randrange(0, 3)),
        restart_threshold=col(lambda: rng.choice([0, 0, 2, 3, 5])),
        restart_window_ns=col(lambda: rng.randrange(1_000_000, 50_000_000)),
        restart_duration_ns=col(lambda: rng.randrange(1_000_000, 30_000_000)),
        seeds=col(lambda: rng.randrange(1 << 64)),
    ), n_rx


def _compare(kernel, args, n_rx):
    size = args["n_beacons"] * n_rx
    tr_kernel = bytearray(size)
    tr_oracle = bytearray(size)
    got = kernel.run_lane(**args, trace=tr_kernel)
    want = run_lane_bruteforce(**args, trace=tr_oracle)
    assert [tuple(x) for x in got] == [tuple(x) for x in want]
    assert tr_kernel == tr_oracle


def test_python_kernel_matches_bruteforce_oracle():
    rng = random.Random(0xACE)
    for _ in range(150):
        args, n_rx = random_micro_args(rng)
        _compare(engine.load_backend("py"), args, n_rx)


def test_default_kernel_matches_bruteforce_oracle():
    rng = random.Random(0xACE)  # same micro-scenarios on the default kernel
    kernel = engine.load_backend()
    for _ in range(150):
        args, n_rx = random_micro_args(rng)
        _compare(kernel, args, n_rx)


def test_oracle_agreement_on_restart_heavy_configs():
    # Dense arrivals with tiny thresholds: restart flush edge cases.
    rng = random.Random(77)
    for _ in range(60):
        n_beacons = rng.randrange(5, 21)
        args = dict(
            n_beacons=n_beacons,
            interval_ns=rng.randrange(1_000, 50_000),
            mean_dbm=[-50.0], sigma_db=[0.0], sensitivity_dbm=[-90.0],
            margin_db=[3.0], rssi_offset=[-45.0], rssi_bias=[0.0],
            rssi_mode=[0],
            service_ns=[rng.randrange(10_000, 400_000)],
            buffer_cap=[rng.randrange(0, 3)],
            restart_threshold=[rng.choice([1, 2, 3])],
            restart_window_ns=[rng.randrange(20_000, 400_000)],
            restart_duration_ns=[rng.randrange(5_000, 200_000)],
            seeds=[rng.randrange(1 << 64)],
        )
        _compare(engine.load_backend("py"), args, 1)
        _compare(engine.load_backend(), args, 1)

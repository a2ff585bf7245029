"""Pure-Python lane kernel: one broadcast run against R receivers.

A lane is one (transmitter, distance, payload, repetition) run: the
transmitter emits `n_beacons` broadcasts at a fixed interval and every
receiver independently samples the channel and services survivors.

This is the reference implementation of the kernel contract; the
compiled kernel in _lanesim.pyx must produce bit-identical results and
the benchmark compares the two.  Times are integer nanoseconds so event
ordering is exact.

Event ordering contract: events are processed in non-decreasing time;
ties break on (kind rank, receiver index, beacon index) with kind ranks

    restart-end < service-done < tx-start < rx-arrival

Restart expiry is realized as a timestamp comparison (an arrival at
exactly the expiry instant is already outside the restart), which is
equivalent to popping an explicit restart-end event first.

Channel sampling draws from the receiver's own stream in a fixed
protocol (shadowing draw only when sigma > 0, Bernoulli draw only when
0 < PER < 1), so receiver state never shifts the stream and independent
implementations can reproduce it draw-for-draw.

Trace codes (one octet per beacon per receiver, row-major by beacon):
0 = received, 1 = channel drop, 2 = overload drop, 3 = restart drop.
"""

import heapq
import math
from collections import deque

TRACE_RECEIVED = 0
TRACE_CHANNEL = 1
TRACE_OVERLOAD = 2
TRACE_RESTART = 3

# Event kind ranks (heap tie-break order).
_K_DONE = 1
_K_TX = 2
_K_ARRIVAL = 3

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0
_TWO_PI = 6.283185307179586

BACKEND = "python"


def _next_u64(state: int) -> tuple:
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def run_lane(n_beacons, interval_ns,
             mean_dbm, sigma_db, sensitivity_dbm, margin_db,
             rssi_offset, rssi_bias, rssi_mode,
             service_ns, buffer_cap,
             restart_threshold, restart_window_ns, restart_duration_ns,
             seeds, trace=None):
    """Simulate one lane; returns one 6-tuple per receiver:

    (received, channel_drops, overload_drops, restart_drops,
     rssi_dbm_sum, rssi_raw_sum)
    """
    n_rx = len(mean_dbm)
    received = [0] * n_rx
    channel_drops = [0] * n_rx
    overload_drops = [0] * n_rx
    restart_drops = [0] * n_rx
    dbm_sum = [0.0] * n_rx
    raw_sum = [0] * n_rx

    rng_state = [s & _MASK for s in seeds]
    rssi_store = [[0.0] * n_beacons for _ in range(n_rx)]

    busy = [False] * n_rx
    in_service = [0] * n_rx
    queue = [deque() for _ in range(n_rx)]
    gen = [0] * n_rx
    restart_until = [-1] * n_rx
    window = [deque(maxlen=restart_threshold[r]) if restart_threshold[r]
              else None for r in range(n_rx)]

    heap = [(interval_ns, _K_TX, 0, 0, 0)]
    push = heapq.heappush
    pop = heapq.heappop

    def account(rx, k):
        received[rx] += 1
        if trace is not None:
            trace[k * n_rx + rx] = TRACE_RECEIVED
        value = rssi_store[rx][k] + rssi_bias[rx]
        mode = rssi_mode[rx]
        if mode == 1:  # magnitude of negative dBm
            raw = math.floor(-value + 0.5)
            raw = 0 if raw < 0 else (255 if raw > 255 else raw)
            dbm_sum[rx] += -float(raw)
            raw_sum[rx] += raw
        else:
            reg = math.floor((value - rssi_offset[rx] + 0.5) if mode == 0
                             else (value + 0.5))
            reg = -128 if reg < -128 else (127 if reg > 127 else reg)
            dbm_sum[rx] += (reg + rssi_offset[rx]) if mode == 0 else float(reg)
            raw_sum[rx] += reg & 0xFF

    while heap:
        t, kind, rx, k, egen = pop(heap)

        if kind == _K_TX:
            # Sample the channel for every receiver, in receiver order.
            for r in range(n_rx):
                state = rng_state[r]
                value = mean_dbm[r]
                if sigma_db[r] > 0.0:
                    state, x1 = _next_u64(state)
                    state, x2 = _next_u64(state)
                    u1 = 1.0 - (x1 >> 11) * _INV_2_53  # (0, 1]
                    u2 = (x2 >> 11) * _INV_2_53
                    value += sigma_db[r] * (
                        math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2))
                rssi_store[r][k] = value
                per = (sensitivity_dbm[r] + margin_db[r] - value) \
                    / (2.0 * margin_db[r])
                dropped = False
                if per >= 1.0:
                    dropped = True
                elif per > 0.0:
                    state, x = _next_u64(state)
                    dropped = (x >> 11) * _INV_2_53 < per
                rng_state[r] = state
                if dropped:
                    channel_drops[r] += 1
                    if trace is not None:
                        trace[k * n_rx + r] = TRACE_CHANNEL
                else:
                    push(heap, (t, _K_ARRIVAL, r, k, 0))
            if k + 1 < n_beacons:
                push(heap, (t + interval_ns, _K_TX, 0, k + 1, 0))

        elif kind == _K_ARRIVAL:
            if t < restart_until[rx]:
                restart_drops[rx] += 1
                if trace is not None:
                    trace[k * n_rx + rx] = TRACE_RESTART
                continue
            win = window[rx]
            if win is not None:
                if len(win) == restart_threshold[rx] \
                        and win[0] > t - restart_window_ns[rx]:
                    # Threshold exceeded: flush everything and go dark.
                    if busy[rx]:
                        restart_drops[rx] += 1
                        if trace is not None:
                            trace[in_service[rx] * n_rx + rx] = TRACE_RESTART
                        busy[rx] = False
                        gen[rx] += 1
                    for qk in queue[rx]:
                        restart_drops[rx] += 1
                        if trace is not None:
                            trace[qk * n_rx + rx] = TRACE_RESTART
                    queue[rx].clear()
                    win.clear()
                    restart_until[rx] = t + restart_duration_ns[rx]
                    restart_drops[rx] += 1
                    if trace is not None:
                        trace[k * n_rx + rx] = TRACE_RESTART
                    continue
                win.append(t)
            if busy[rx]:
                if len(queue[rx]) < buffer_cap[rx]:
                    queue[rx].append(k)
                else:
                    overload_drops[rx] += 1
                    if trace is not None:
                        trace[k * n_rx + rx] = TRACE_OVERLOAD
            else:
                busy[rx] = True
                in_service[rx] = k
                push(heap, (t + service_ns[rx], _K_DONE, rx, k, gen[rx]))

        else:  # _K_DONE
            if egen != gen[rx]:
                continue  # cancelled by a restart flush
            account(rx, k)
            if queue[rx]:
                nxt = queue[rx].popleft()
                in_service[rx] = nxt
                push(heap, (t + service_ns[rx], _K_DONE, rx, nxt, gen[rx]))
            else:
                busy[rx] = False

    return [(received[r], channel_drops[r], overload_drops[r],
             restart_drops[r], dbm_sum[r], raw_sum[r]) for r in range(n_rx)]

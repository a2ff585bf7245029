# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled lane kernel.

Semantics are defined by hetnet154._lanesim_py (the pure-Python
reference); this extension exists purely for speed and must produce
bit-identical counters, RSSI sums and traces.  The RNG, the Box-Muller
shadowing draw, the PER ramp and the RSSI quantization replicate the
reference arithmetic operation for operation.
"""

from cython.view cimport array as cvarray
from libc.math cimport cos, floor, log, sqrt
from libc.stdint cimport int64_t, uint64_t

BACKEND = "c"

cdef extern from *:
    """
    #define HN_GOLDEN 0x9E3779B97F4A7C15ULL
    #define HN_MIX1   0xBF58476D1CE4E5B9ULL
    #define HN_MIX2   0x94D049BB133111EBULL
    """
    uint64_t HN_GOLDEN
    uint64_t HN_MIX1
    uint64_t HN_MIX2

cdef enum:
    TRACE_RECEIVED = 0
    TRACE_CHANNEL = 1
    TRACE_OVERLOAD = 2
    TRACE_RESTART = 3

# Event kinds, ordered by tie-break rank at equal timestamps.
cdef enum:
    K_DONE = 1
    K_TX = 2
    K_ARRIVAL = 3

cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef double TWO_PI = 6.283185307179586


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * HN_MIX1
    z = (z ^ (z >> 27)) * HN_MIX2
    return z ^ (z >> 31)


cdef double[::1] _dvec(Py_ssize_t n):
    return cvarray(shape=(n,), itemsize=sizeof(double), format="d")


cdef int64_t[::1] _ivec64(Py_ssize_t n):
    return cvarray(shape=(n,), itemsize=sizeof(int64_t), format="q")


cdef uint64_t[::1] _uvec64(Py_ssize_t n):
    return cvarray(shape=(n,), itemsize=sizeof(uint64_t), format="Q")


cdef int[::1] _ivec(Py_ssize_t n):
    return cvarray(shape=(n,), itemsize=sizeof(int), format="i")


def run_lane(int n_beacons, int64_t interval_ns,
             mean_dbm, sigma_db, sensitivity_dbm, margin_db,
             rssi_offset, rssi_bias, rssi_mode,
             service_ns, buffer_cap,
             restart_threshold, restart_window_ns, restart_duration_ns,
             seeds, trace=None):
    """Drop-in replacement for _lanesim_py.run_lane."""
    cdef int n_rx = len(mean_dbm)
    if n_rx < 1 or n_rx > 15:
        raise ValueError("kernel supports 1..15 receivers per lane")
    if n_beacons < 1:
        raise ValueError("need at least one beacon")
    if interval_ns < 1:
        raise ValueError("interval must be >= 1 ns")

    cdef unsigned char[::1] tr = None
    cdef bint want_trace = trace is not None
    if want_trace:
        tr = trace
        if tr.shape[0] < n_beacons * n_rx:
            raise ValueError("trace buffer too small")

    cdef Py_ssize_t r
    cdef double[::1] c_mean = _dvec(n_rx)
    cdef double[::1] c_sigma = _dvec(n_rx)
    cdef double[::1] c_sens = _dvec(n_rx)
    cdef double[::1] c_margin = _dvec(n_rx)
    cdef double[::1] c_offset = _dvec(n_rx)
    cdef double[::1] c_bias = _dvec(n_rx)
    cdef int[::1] c_mode = _ivec(n_rx)
    cdef int64_t[::1] c_service = _ivec64(n_rx)
    cdef int[::1] c_buffer = _ivec(n_rx)
    cdef int[::1] c_thresh = _ivec(n_rx)
    cdef int64_t[::1] c_window = _ivec64(n_rx)
    cdef int64_t[::1] c_duration = _ivec64(n_rx)
    cdef uint64_t[::1] c_state = _uvec64(n_rx)

    cdef int64_t[::1] received = _ivec64(n_rx)
    cdef int64_t[::1] channel_drops = _ivec64(n_rx)
    cdef int64_t[::1] overload_drops = _ivec64(n_rx)
    cdef int64_t[::1] restart_drops = _ivec64(n_rx)
    cdef double[::1] dbm_sum = _dvec(n_rx)
    cdef int64_t[::1] raw_sum = _ivec64(n_rx)

    cdef double[::1] rssi_store = _dvec(<Py_ssize_t> n_rx * n_beacons)

    cdef int[::1] busy = _ivec(n_rx)
    cdef int[::1] in_service = _ivec(n_rx)
    cdef int[::1] gen = _ivec(n_rx)
    cdef int64_t[::1] restart_until = _ivec64(n_rx)

    cdef int q_stride = 1
    cdef int w_stride = 1
    for r in range(n_rx):
        if <int> buffer_cap[r] > q_stride:
            q_stride = <int> buffer_cap[r]
        if <int> restart_threshold[r] > w_stride:
            w_stride = <int> restart_threshold[r]
    cdef int[::1] q_ring = _ivec(<Py_ssize_t> n_rx * q_stride)
    cdef int[::1] q_head = _ivec(n_rx)
    cdef int[::1] q_len = _ivec(n_rx)
    cdef int64_t[::1] w_ring = _ivec64(<Py_ssize_t> n_rx * w_stride)
    cdef int[::1] w_head = _ivec(n_rx)
    cdef int[::1] w_len = _ivec(n_rx)

    # Heap bound: one tx event, at most one arrival and one live service
    # completion per receiver, plus stale completions orphaned by restart
    # flushes (at most one per flush, each flush consumes an arrival).
    cdef int heap_cap = 8 + 4 * n_rx + n_beacons
    cdef uint64_t[::1] h_key = _uvec64(heap_cap)
    cdef int[::1] h_beacon = _ivec(heap_cap)
    cdef int[::1] h_gen = _ivec(heap_cap)
    cdef int heap_size = 0

    for r in range(n_rx):
        c_mean[r] = <double> mean_dbm[r]
        c_sigma[r] = <double> sigma_db[r]
        c_sens[r] = <double> sensitivity_dbm[r]
        c_margin[r] = <double> margin_db[r]
        c_offset[r] = <double> rssi_offset[r]
        c_bias[r] = <double> rssi_bias[r]
        c_mode[r] = <int> rssi_mode[r]
        c_service[r] = <int64_t> service_ns[r]
        c_buffer[r] = <int> buffer_cap[r]
        c_thresh[r] = <int> restart_threshold[r]
        c_window[r] = <int64_t> restart_window_ns[r]
        c_duration[r] = <int64_t> restart_duration_ns[r]
        c_state[r] = <uint64_t> seeds[r]
        received[r] = 0; channel_drops[r] = 0
        overload_drops[r] = 0; restart_drops[r] = 0
        dbm_sum[r] = 0.0; raw_sum[r] = 0
        busy[r] = 0; in_service[r] = 0; gen[r] = 0; restart_until[r] = -1
        q_head[r] = 0; q_len[r] = 0; w_head[r] = 0; w_len[r] = 0

    cdef uint64_t key, x1, x2, x
    cdef int64_t t
    cdef int kind, rx, k, egen, nxt, j, pos, ri
    cdef double value, per, u1, u2, raw_f
    cdef long reg
    cdef bint dropped, win_full

    _push(h_key, h_beacon, h_gen, &heap_size,
          (<uint64_t> interval_ns << 6) | (K_TX << 4), 0, 0)
    while heap_size > 0:
        key = h_key[0]
        k = h_beacon[0]
        egen = h_gen[0]
        _pop(h_key, h_beacon, h_gen, &heap_size)
        t = <int64_t> (key >> 6)
        kind = <int> ((key >> 4) & 3)
        rx = <int> (key & 15)

        if kind == K_TX:
            for ri in range(n_rx):
                value = c_mean[ri]
                if c_sigma[ri] > 0.0:
                    x1 = c_state[ri] + HN_GOLDEN
                    c_state[ri] = x1
                    x1 = _mix64(x1)
                    x2 = c_state[ri] + HN_GOLDEN
                    c_state[ri] = x2
                    x2 = _mix64(x2)
                    u1 = 1.0 - (x1 >> 11) * INV_2_53
                    u2 = (x2 >> 11) * INV_2_53
                    value += c_sigma[ri] * (
                        sqrt(-2.0 * log(u1)) * cos(TWO_PI * u2))
                rssi_store[ri * n_beacons + k] = value
                per = (c_sens[ri] + c_margin[ri] - value) / (2.0 * c_margin[ri])
                dropped = 0
                if per >= 1.0:
                    dropped = 1
                elif per > 0.0:
                    x = c_state[ri] + HN_GOLDEN
                    c_state[ri] = x
                    x = _mix64(x)
                    dropped = (x >> 11) * INV_2_53 < per
                if dropped:
                    channel_drops[ri] += 1
                    if want_trace:
                        tr[k * n_rx + ri] = TRACE_CHANNEL
                else:
                    _push(h_key, h_beacon, h_gen, &heap_size,
                          (<uint64_t> t << 6) | (K_ARRIVAL << 4)
                          | <uint64_t> ri, k, 0)
            if k + 1 < n_beacons:
                _push(h_key, h_beacon, h_gen, &heap_size,
                      (<uint64_t> (t + interval_ns) << 6) | (K_TX << 4),
                      k + 1, 0)

        elif kind == K_ARRIVAL:
            if t < restart_until[rx]:
                restart_drops[rx] += 1
                if want_trace:
                    tr[k * n_rx + rx] = TRACE_RESTART
                continue
            if c_thresh[rx] > 0:
                win_full = w_len[rx] == c_thresh[rx]
                if win_full and w_ring[rx * w_stride + w_head[rx]] \
                        > t - c_window[rx]:
                    # Threshold exceeded: flush everything, go dark.
                    if busy[rx]:
                        restart_drops[rx] += 1
                        if want_trace:
                            tr[in_service[rx] * n_rx + rx] = TRACE_RESTART
                        busy[rx] = 0
                        gen[rx] += 1
                    for j in range(q_len[rx]):
                        pos = rx * q_stride + ((q_head[rx] + j) % q_stride)
                        restart_drops[rx] += 1
                        if want_trace:
                            tr[q_ring[pos] * n_rx + rx] = TRACE_RESTART
                    q_len[rx] = 0
                    q_head[rx] = 0
                    w_len[rx] = 0
                    w_head[rx] = 0
                    restart_until[rx] = t + c_duration[rx]
                    restart_drops[rx] += 1
                    if want_trace:
                        tr[k * n_rx + rx] = TRACE_RESTART
                    continue
                if win_full:
                    w_ring[rx * w_stride + w_head[rx]] = t
                    w_head[rx] = (w_head[rx] + 1) % c_thresh[rx]
                else:
                    pos = rx * w_stride + ((w_head[rx] + w_len[rx])
                                           % c_thresh[rx])
                    w_ring[pos] = t
                    w_len[rx] += 1
            if busy[rx]:
                if q_len[rx] < c_buffer[rx]:
                    pos = rx * q_stride + ((q_head[rx] + q_len[rx]) % q_stride)
                    q_ring[pos] = k
                    q_len[rx] += 1
                else:
                    overload_drops[rx] += 1
                    if want_trace:
                        tr[k * n_rx + rx] = TRACE_OVERLOAD
            else:
                busy[rx] = 1
                in_service[rx] = k
                _push(h_key, h_beacon, h_gen, &heap_size,
                      (<uint64_t> (t + c_service[rx]) << 6)
                      | (K_DONE << 4) | <uint64_t> rx, k, gen[rx])

        else:  # K_DONE
            if egen != gen[rx]:
                continue  # cancelled by a restart flush
            received[rx] += 1
            if want_trace:
                tr[k * n_rx + rx] = TRACE_RECEIVED
            value = rssi_store[rx * n_beacons + k] + c_bias[rx]
            if c_mode[rx] == 1:
                raw_f = floor(-value + 0.5)
                reg = 0 if raw_f < 0 else (255 if raw_f > 255 else <long> raw_f)
                dbm_sum[rx] += -(<double> reg)
                raw_sum[rx] += reg
            else:
                if c_mode[rx] == 0:
                    raw_f = floor(value - c_offset[rx] + 0.5)
                else:
                    raw_f = floor(value + 0.5)
                reg = -128 if raw_f < -128 else (127 if raw_f > 127
                                                 else <long> raw_f)
                if c_mode[rx] == 0:
                    dbm_sum[rx] += reg + c_offset[rx]
                else:
                    dbm_sum[rx] += <double> reg
                raw_sum[rx] += reg & 0xFF
            if q_len[rx] > 0:
                nxt = q_ring[rx * q_stride + q_head[rx]]
                q_head[rx] = (q_head[rx] + 1) % q_stride
                q_len[rx] -= 1
                in_service[rx] = nxt
                _push(h_key, h_beacon, h_gen, &heap_size,
                      (<uint64_t> (t + c_service[rx]) << 6)
                      | (K_DONE << 4) | <uint64_t> rx, nxt, gen[rx])
            else:
                busy[rx] = 0

    out = []
    for r in range(n_rx):
        out.append((received[r], channel_drops[r], overload_drops[r],
                    restart_drops[r], dbm_sum[r], raw_sum[r]))
    return out


cdef inline void _push(uint64_t[::1] h_key, int[::1] h_beacon, int[::1] h_gen,
                       int* size, uint64_t key, int beacon, int gen):
    cdef int i = size[0]
    cdef int parent
    cdef uint64_t tk
    cdef int tb, tg
    if i >= h_key.shape[0]:
        raise RuntimeError("event heap bound exceeded")
    h_key[i] = key
    h_beacon[i] = beacon
    h_gen[i] = gen
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if h_key[parent] <= h_key[i]:
            break
        tk = h_key[parent]; h_key[parent] = h_key[i]; h_key[i] = tk
        tb = h_beacon[parent]; h_beacon[parent] = h_beacon[i]; h_beacon[i] = tb
        tg = h_gen[parent]; h_gen[parent] = h_gen[i]; h_gen[i] = tg
        i = parent


cdef inline void _pop(uint64_t[::1] h_key, int[::1] h_beacon, int[::1] h_gen,
                      int* size):
    cdef int i = 0
    cdef int child
    cdef uint64_t tk
    cdef int tb, tg
    size[0] -= 1
    h_key[0] = h_key[size[0]]
    h_beacon[0] = h_beacon[size[0]]
    h_gen[0] = h_gen[size[0]]
    while True:
        child = 2 * i + 1
        if child >= size[0]:
            break
        if child + 1 < size[0] and h_key[child + 1] < h_key[child]:
            child += 1
        if h_key[i] <= h_key[child]:
            break
        tk = h_key[i]; h_key[i] = h_key[child]; h_key[child] = tk
        tb = h_beacon[i]; h_beacon[i] = h_beacon[child]; h_beacon[child] = tb
        tg = h_gen[i]; h_gen[i] = h_gen[child]; h_gen[child] = tg
        i = child

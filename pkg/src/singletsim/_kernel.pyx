# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trial kernel.

Replicates singletsim._pybackend.run_trials bit for bit: same Philox-4x32
streams, same direction construction, same left-to-right float arithmetic.
Keep the two implementations in lockstep; tests/test_backends.py enforces
equality.
"""

from libc.math cimport sqrt
from libc.stdint cimport int8_t, int32_t, int64_t, uint32_t, uint64_t

cdef double _TWO_NEG53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t x) nogil:
    x ^= x >> 30
    x *= <uint64_t>0xBF58476D1CE4E5B9
    x ^= x >> 27
    x *= <uint64_t>0x94D049BB133111EB
    x ^= x >> 31
    return x


cdef inline uint64_t _smix(uint64_t x) nogil:
    return _mix64(x + <uint64_t>0x9E3779B97F4A7C15)


cdef inline void _philox(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                         uint32_t k0, uint32_t k1, uint32_t* out) nogil:
    cdef uint64_t p0, p1
    cdef uint32_t t0, t1, t2, t3
    cdef int r
    for r in range(10):
        if r:
            k0 += <uint32_t>0x9E3779B9
            k1 += <uint32_t>0xBB67AE85
        p0 = (<uint64_t>0xD2511F53) * c0
        p1 = (<uint64_t>0xCD9E8D57) * c2
        t0 = (<uint32_t>(p1 >> 32)) ^ c1 ^ k0
        t1 = <uint32_t>p1
        t2 = (<uint32_t>(p0 >> 32)) ^ c3 ^ k1
        t3 = <uint32_t>p0
        c0 = t0
        c1 = t1
        c2 = t2
        c3 = t3
    out[0] = c0
    out[1] = c1
    out[2] = c2
    out[3] = c3


cdef inline double _dbl(uint32_t hi, uint32_t lo) nogil:
    cdef uint64_t u = ((<uint64_t>hi) << 32) | lo
    return <double>(u >> 11) * _TWO_NEG53


cdef inline int _direction(uint64_t seed, uint64_t stream, uint32_t slot,
                           double* dx, double* dy, double* dz) nogil:
    cdef uint32_t out[4]
    cdef uint32_t base = slot << 6
    cdef uint32_t k0 = <uint32_t>seed
    cdef uint32_t k1 = <uint32_t>(seed >> 32)
    cdef uint32_t s0 = <uint32_t>stream
    cdef uint32_t s1 = <uint32_t>(stream >> 32)
    cdef double z, x, y, r2, scale
    cdef uint32_t t
    _philox(base, s0, s1, 0, k0, k1, out)
    z = 2.0 * _dbl(out[0], out[1]) - 1.0
    for t in range(1, 64):
        _philox(base | t, s0, s1, 0, k0, k1, out)
        x = 2.0 * _dbl(out[0], out[1]) - 1.0
        y = 2.0 * _dbl(out[2], out[3]) - 1.0
        r2 = x * x + y * y
        if r2 > 0.0 and r2 <= 1.0:
            scale = sqrt((1.0 - z * z) / r2)
            dx[0] = x * scale
            dy[0] = y * scale
            dz[0] = z
            return 0
    return 1


cdef inline double _direction_z(uint64_t seed, uint64_t stream, uint32_t slot) nogil:
    cdef uint32_t out[4]
    _philox(slot << 6, <uint32_t>stream, <uint32_t>(stream >> 32), 0,
            <uint32_t>seed, <uint32_t>(seed >> 32), out)
    return 2.0 * _dbl(out[0], out[1]) - 1.0


def run_trials(uint64_t seed, uint64_t base_stream, uint64_t trial_start, Py_ssize_t n_trials,
               double ax, double ay, double az, double bx, double by, double bz,
               const int8_t[::1] kind, const int64_t[::1] coeff2, const double[::1] bias,
               int32_t[::1] alpha2, int32_t[::1] beta2,
               int8_t[:, ::1] cbits, int8_t[:, ::1] fbits):
    """Run trials trial_start..trial_start+n_trials-1, filling the output arrays.

    Trial t draws from stream split(base_stream, t); per step the draw order
    is lambda, mu, then (integer steps only) the nu z coordinate.
    """
    cdef Py_ssize_t t
    cdef int n_steps = <int>kind.shape[0]
    cdef int k, sa, sm, sb, c, f, fj, fail = 0
    cdef int64_t acc_a, acc_b, co, gate
    cdef uint64_t stream
    cdef uint32_t slot
    cdef double lx, ly, lz, mx, my, mz, wx, wy, wz, da, db, zq, cf
    with nogil:
        for t in range(n_trials):
            stream = _smix(base_stream ^ _smix(trial_start + <uint64_t>t))
            slot = 0
            acc_a = 0
            acc_b = 0
            fj = 0
            for k in range(n_steps):
                if _direction(seed, stream, slot, &lx, &ly, &lz):
                    fail = 1
                slot += 1
                if _direction(seed, stream, slot, &mx, &my, &mz):
                    fail = 1
                slot += 1
                da = ax * lx + ay * ly + az * lz
                sa = 1 if da >= 0.0 else -1
                da = ax * mx + ay * my + az * mz
                sm = 1 if da >= 0.0 else -1
                c = sa * sm
                cf = <double>c
                wx = lx + cf * mx
                wy = ly + cf * my
                wz = lz + cf * mz
                db = bx * wx + by * wy + bz * wz
                sb = 1 if db >= 0.0 else -1
                co = coeff2[k]
                if kind[k] == 0:
                    acc_a = acc_a + co * sa
                    acc_b = acc_b + co * sb
                else:
                    zq = _direction_z(seed, stream, slot)
                    slot += 1
                    f = 1 if zq + bias[k] >= 0.0 else -1
                    gate = (1 + f) >> 1
                    acc_a = gate * (co * sa + acc_a)
                    acc_b = gate * (co * sb + acc_b)
                    fbits[t, fj] = <int8_t>f
                    fj += 1
                cbits[t, k] = <int8_t>c
            alpha2[t] = <int32_t>(-acc_a)
            beta2[t] = <int32_t>acc_b
    if fail:
        raise RuntimeError("azimuth rejection sampling exhausted its attempt budget")

"""Counter-based pseudo-randomness shared by every backend.

The generator is Philox-4x32 with 10 rounds, keyed by the 64-bit seed,
with the 128-bit counter split as (block, stream_lo, stream_hi, 0). Each
unit-vector draw owns a window of 64 counter blocks: block slot*64
supplies the polar z coordinate and blocks slot*64 + t (t >= 1) supply
candidate points for the in-disk rejection step that builds the azimuthal
part. Downstream of the raw bits only correctly-rounded IEEE operations
are used (+, -, *, /, sqrt), which is what lets the compiled kernel and
this numpy implementation produce bit-identical values.

Both a scalar (pure int/float) and a vectorized (numpy) version of every
primitive live here; the test suite checks them against each other and
against the published Philox known-answer vectors.
"""

from __future__ import annotations

import math

import numpy as np

_M32 = 0xFFFFFFFF
_M64 = 0xFFFFFFFFFFFFFFFF

_PHILOX_M0 = 0xD2511F53
_PHILOX_M1 = 0xCD9E8D57
_PHILOX_W0 = 0x9E3779B9
_PHILOX_W1 = 0xBB67AE85
_GOLDEN = 0x9E3779B97F4A7C15

_TWO_NEG53 = 1.0 / 9007199254740992.0  # 2**-53

BLOCKS_PER_SLOT = 64
MAX_AZIMUTH_ATTEMPTS = BLOCKS_PER_SLOT - 1
MAX_SLOTS = 1 << 26  # block counter is 32-bit, 64 blocks per slot


# ---------------------------------------------------------------------------
# scalar primitives


def philox4x32(c0: int, c1: int, c2: int, c3: int, k0: int, k1: int) -> tuple[int, int, int, int]:
    """One Philox-4x32-10 block: counter (c0..c3), key (k0, k1) -> 4 words."""
    for r in range(10):
        if r:
            k0 = (k0 + _PHILOX_W0) & _M32
            k1 = (k1 + _PHILOX_W1) & _M32
        p0 = _PHILOX_M0 * c0
        p1 = _PHILOX_M1 * c2
        c0, c1, c2, c3 = (
            ((p1 >> 32) ^ c1 ^ k0) & _M32,
            p1 & _M32,
            ((p0 >> 32) ^ c3 ^ k1) & _M32,
            p0 & _M32,
        )
    return c0, c1, c2, c3


def block_doubles(seed: int, stream: int, block: int) -> tuple[float, float]:
    """Two uniform doubles in [0, 1) from one counter block (53-bit mantissas)."""
    o0, o1, o2, o3 = philox4x32(
        block & _M32, stream & _M32, (stream >> 32) & _M32, 0, seed & _M32, (seed >> 32) & _M32
    )
    d0 = (((o0 << 32) | o1) >> 11) * _TWO_NEG53
    d1 = (((o2 << 32) | o3) >> 11) * _TWO_NEG53
    return d0, d1


def mix64(x: int) -> int:
    x &= _M64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _M64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _M64
    x ^= x >> 31
    return x


def smix(x: int) -> int:
    return mix64((x + _GOLDEN) & _M64)


def split_index(parent_stream: int, index: int) -> int:
    """Stream index of child `index` of a stream; deterministic and well mixed."""
    return smix((parent_stream ^ smix(index & _M64)) & _M64)


def direction_scalar(seed: int, stream: int, slot: int) -> tuple[float, float, float]:
    """Uniform unit vector for draw `slot` of a stream.

    z is uniform on [-1, 1); the azimuthal unit vector comes from rejection
    sampling of the unit disk, so the result is exactly area-uniform without
    any trig calls.
    """
    if slot >= MAX_SLOTS:
        raise RuntimeError("random stream exhausted (2**26 direction draws)")
    base = slot << 6
    d0, _ = block_doubles(seed, stream, base)
    z = 2.0 * d0 - 1.0
    for t in range(1, BLOCKS_PER_SLOT):
        d0, d1 = block_doubles(seed, stream, base | t)
        x = 2.0 * d0 - 1.0
        y = 2.0 * d1 - 1.0
        r2 = x * x + y * y
        if 0.0 < r2 <= 1.0:
            scale = math.sqrt((1.0 - z * z) / r2)
            return x * scale, y * scale, z
    raise RuntimeError("azimuth rejection sampling exhausted its attempt budget")


def direction_z_scalar(seed: int, stream: int, slot: int) -> float:
    """Just the z coordinate of the direction at `slot` (cheap f-bit path)."""
    if slot >= MAX_SLOTS:
        raise RuntimeError("random stream exhausted (2**26 direction draws)")
    d0, _ = block_doubles(seed, stream, slot << 6)
    return 2.0 * d0 - 1.0


# ---------------------------------------------------------------------------
# vectorized primitives


def _u64(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=np.uint64))


def philox4x32_vec(c0, c1, c2, c3, k0: int, k1: int):
    """Vectorized Philox-4x32-10; counter components broadcast together."""
    x0, x1, x2, x3 = (
        np.atleast_1d(np.asarray(c, dtype=np.uint32)) for c in np.broadcast_arrays(c0, c1, c2, c3)
    )
    m0 = np.uint64(_PHILOX_M0)
    m1 = np.uint64(_PHILOX_M1)
    for r in range(10):
        if r:
            k0 = (k0 + _PHILOX_W0) & _M32
            k1 = (k1 + _PHILOX_W1) & _M32
        p0 = m0 * x0.astype(np.uint64)
        p1 = m1 * x2.astype(np.uint64)
        n0 = (p1 >> np.uint64(32)).astype(np.uint32) ^ x1 ^ np.uint32(k0)
        n1 = p1.astype(np.uint32)
        n2 = (p0 >> np.uint64(32)).astype(np.uint32) ^ x3 ^ np.uint32(k1)
        n3 = p0.astype(np.uint32)
        x0, x1, x2, x3 = n0, n1, n2, n3
    return x0, x1, x2, x3


def _pair_to_double(hi: np.ndarray, lo: np.ndarray) -> np.ndarray:
    u = (hi.astype(np.uint64) << np.uint64(32)) | lo.astype(np.uint64)
    return (u >> np.uint64(11)) * _TWO_NEG53


def block_doubles_vec(seed: int, stream, block):
    """Vectorized block_doubles; `stream` and `block` broadcast together."""
    stream = _u64(stream)
    block = _u64(block)
    o0, o1, o2, o3 = philox4x32_vec(
        block, stream & np.uint64(_M32), stream >> np.uint64(32), np.uint64(0),
        seed & _M32, (seed >> 32) & _M32,
    )
    return _pair_to_double(o0, o1), _pair_to_double(o2, o3)


def mix64_vec(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(0xBF58476D1CE4E5B9)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def smix_vec(x: np.ndarray) -> np.ndarray:
    return mix64_vec(x + np.uint64(_GOLDEN))


def split_index_vec(parent_stream: int, indices) -> np.ndarray:
    return smix_vec(np.uint64(parent_stream) ^ smix_vec(_u64(indices)))


def directions_vec(seed: int, stream, slot):
    """Vectorized direction_scalar; `stream` and `slot` broadcast together.

    Returns (x, y, z) float64 arrays of the broadcast shape. Rejection
    attempts are indexed by counter block, so the result for each element is
    independent of how the batch is partitioned.
    """
    stream, slot = np.broadcast_arrays(_u64(stream), _u64(slot))
    if slot.size and int(slot.max()) >= MAX_SLOTS:
        raise RuntimeError("random stream exhausted (2**26 direction draws)")
    shape = stream.shape
    stream = stream.ravel()
    base = slot.ravel() << np.uint64(6)

    d0, _ = block_doubles_vec(seed, stream, base)
    z = 2.0 * d0 - 1.0

    n = stream.size
    x = np.zeros(n)
    y = np.zeros(n)
    pending = np.arange(n)
    t = 1
    while pending.size:
        if t > MAX_AZIMUTH_ATTEMPTS:
            raise RuntimeError("azimuth rejection sampling exhausted its attempt budget")
        d0, d1 = block_doubles_vec(seed, stream[pending], base[pending] | np.uint64(t))
        xx = 2.0 * d0 - 1.0
        yy = 2.0 * d1 - 1.0
        r2 = xx * xx + yy * yy
        ok = (r2 > 0.0) & (r2 <= 1.0)
        accepted = pending[ok]
        x[accepted] = xx[ok]
        y[accepted] = yy[ok]
        pending = pending[~ok]
        t += 1

    r2 = x * x + y * y
    scale = np.sqrt((1.0 - z * z) / r2)
    return (x * scale).reshape(shape), (y * scale).reshape(shape), z.reshape(shape)


def directions_z_vec(seed: int, stream, slot) -> np.ndarray:
    """Vectorized direction_z_scalar."""
    stream, slot = np.broadcast_arrays(_u64(stream), _u64(slot))
    if slot.size and int(slot.max()) >= MAX_SLOTS:
        raise RuntimeError("random stream exhausted (2**26 direction draws)")
    d0, _ = block_doubles_vec(seed, stream.ravel(), slot.ravel() << np.uint64(6))
    return (2.0 * d0 - 1.0).reshape(stream.shape)

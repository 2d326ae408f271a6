"""Vectorized numpy implementation of the trial kernel (fallback backend).

Must stay bit-for-bit interchangeable with singletsim._kernel.run_trials;
every float expression below is written in the same association order as
the compiled code.
"""

from __future__ import annotations

import numpy as np

from . import _philox


def run_trials(seed, base_stream, trial_start, n_trials,
               ax, ay, az, bx, by, bz,
               kind, coeff2, bias,
               alpha2, beta2, cbits, fbits):
    """Same contract as the compiled kernel: fill the per-trial output arrays."""
    streams = _philox.split_index_vec(
        base_stream, np.uint64(trial_start) + np.arange(n_trials, dtype=np.uint64)
    )
    acc_a = np.zeros(n_trials, dtype=np.int64)
    acc_b = np.zeros(n_trials, dtype=np.int64)
    slot = 0
    fj = 0
    for k in range(len(kind)):
        lx, ly, lz = _philox.directions_vec(seed, streams, np.uint64(slot))
        slot += 1
        mx, my, mz = _philox.directions_vec(seed, streams, np.uint64(slot))
        slot += 1
        da = ax * lx + ay * ly + az * lz
        sa = np.where(da >= 0.0, 1, -1).astype(np.int64)
        da = ax * mx + ay * my + az * mz
        sm = np.where(da >= 0.0, 1, -1).astype(np.int64)
        c = sa * sm
        cf = c.astype(np.float64)
        wx = lx + cf * mx
        wy = ly + cf * my
        wz = lz + cf * mz
        db = bx * wx + by * wy + bz * wz
        sb = np.where(db >= 0.0, 1, -1).astype(np.int64)
        co = int(coeff2[k])
        if kind[k] == 0:
            acc_a = acc_a + co * sa
            acc_b = acc_b + co * sb
        else:
            zq = _philox.directions_z_vec(seed, streams, np.uint64(slot))
            slot += 1
            f = np.where(zq + bias[k] >= 0.0, 1, -1).astype(np.int64)
            gate = (1 + f) >> 1
            acc_a = gate * (co * sa + acc_a)
            acc_b = gate * (co * sb + acc_b)
            fbits[:, fj] = f
            fj += 1
        cbits[:, k] = c
    alpha2[:] = -acc_a
    beta2[:] = acc_b

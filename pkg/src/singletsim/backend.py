"""Trial-kernel backend selection and the parallel batch driver.

The compiled Cython kernel is used when the extension built; otherwise the
vectorized numpy implementation takes over. Both produce bit-identical
output, so the choice never changes results. Force one explicitly with the
SINGLET_SIM_BACKEND environment variable ("cython" or "python") or the
`backend` argument.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _pybackend
from .randomness import Direction
from .spins import BinaryChain, HalfInteger, StepKind

try:
    from . import _kernel as _compiled
except ImportError:  # extension not built; numpy fallback only
    _compiled = None

_BLOCK_SIZE = 1 << 16


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _compiled is not None else ("python",)


def active_backend(backend: str | None = None) -> str:
    """Resolve a backend name ("auto"/None honours SINGLET_SIM_BACKEND)."""
    if backend in (None, "", "auto"):
        backend = os.environ.get("SINGLET_SIM_BACKEND", "") or "auto"
    if backend == "auto":
        return "cython" if _compiled is not None else "python"
    if backend not in ("cython", "python"):
        raise ValueError(f"unknown backend {backend!r}; expected 'auto', 'cython' or 'python'")
    if backend == "cython" and _compiled is None:
        raise RuntimeError("compiled kernel is not available; build the extension or use 'python'")
    return backend


@dataclass(frozen=True)
class TrialArrays:
    """Per-trial outcomes of a batch: exact twice-values plus transcripts."""

    alpha2: np.ndarray  # int32 (n,)
    beta2: np.ndarray  # int32 (n,)
    cbits: np.ndarray  # int8 (n, n_steps)
    fbits: np.ndarray  # int8 (n, n_integer_steps)

    def __len__(self) -> int:
        return len(self.alpha2)

    def alphas(self) -> list[HalfInteger]:
        return [HalfInteger(int(v)) for v in self.alpha2]

    def betas(self) -> list[HalfInteger]:
        return [HalfInteger(int(v)) for v in self.beta2]


def chain_arrays(chain: BinaryChain) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Chain encoded for the kernels: step kind, twice-coefficient, float bias."""
    n = chain.n_steps
    kind = np.zeros(n, dtype=np.int8)
    coeff2 = np.zeros(n, dtype=np.int64)
    bias = np.zeros(n, dtype=np.float64)
    for k, step in enumerate(chain.steps):
        kind[k] = 1 if step.kind is StepKind.INTEGER else 0
        coeff2[k] = step.coefficient.twice
        if step.f_bias is not None:
            bias[k] = float(step.f_bias)
    return kind, coeff2, bias


def run_trials(chain: BinaryChain, a: Direction, b: Direction, n_trials: int,
               seed: int, base_stream: int = 0, trial_offset: int = 0,
               backend: str | None = None) -> TrialArrays:
    """Run one contiguous block of trials on the selected backend."""
    kind, coeff2, bias = chain_arrays(chain)
    return _run_block(kind, coeff2, bias, a, b, n_trials, seed, base_stream,
                      trial_offset, active_backend(backend))


def _run_block(kind, coeff2, bias, a, b, n_trials, seed, base_stream, trial_offset,
               backend_name) -> TrialArrays:
    n_steps = len(kind)
    n_int = int(kind.sum())
    alpha2 = np.empty(n_trials, dtype=np.int32)
    beta2 = np.empty(n_trials, dtype=np.int32)
    cbits = np.zeros((n_trials, n_steps), dtype=np.int8)
    fbits = np.zeros((n_trials, n_int), dtype=np.int8)
    impl = _compiled if backend_name == "cython" else _pybackend
    impl.run_trials(seed & 0xFFFFFFFFFFFFFFFF, base_stream & 0xFFFFFFFFFFFFFFFF,
                    trial_offset, n_trials,
                    a.x, a.y, a.z, b.x, b.y, b.z,
                    kind, coeff2, bias, alpha2, beta2, cbits, fbits)
    return TrialArrays(alpha2, beta2, cbits, fbits)


def simulate_trials(chain: BinaryChain, a: Direction, b: Direction, n_trials: int,
                    seed: int, base_stream: int = 0, workers: int = 1,
                    backend: str | None = None) -> TrialArrays:
    """Run a batch of protocol trials, optionally across a thread pool.

    Trial t always draws from stream split(base_stream, t), so the output is
    a pure function of (chain, a, b, n_trials, seed, base_stream) no matter
    how many workers run the blocks.
    """
    backend_name = active_backend(backend)
    kind, coeff2, bias = chain_arrays(chain)
    starts = list(range(0, n_trials, _BLOCK_SIZE))
    if workers <= 1 or len(starts) <= 1:
        blocks = [
            _run_block(kind, coeff2, bias, a, b, min(_BLOCK_SIZE, n_trials - s),
                       seed, base_stream, s, backend_name)
            for s in starts
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(
                lambda s: _run_block(kind, coeff2, bias, a, b,
                                     min(_BLOCK_SIZE, n_trials - s),
                                     seed, base_stream, s, backend_name),
                starts,
            ))
    if not blocks:
        return _run_block(kind, coeff2, bias, a, b, 0, seed, base_stream, 0, backend_name)
    return TrialArrays(
        np.concatenate([blk.alpha2 for blk in blocks]),
        np.concatenate([blk.beta2 for blk in blocks]),
        np.concatenate([blk.cbits for blk in blocks]),
        np.concatenate([blk.fbits for blk in blocks]),
    )

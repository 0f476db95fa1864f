#!/usr/bin/env python3
"""Benchmark the compiled kernel against the NumPy fallback.

Times the three hot paths: single-grid forward evaluation, the batched
shift-rule evaluation used by every optimiser step, and final-state batches
(expressibility / distortion sweeps).  Run after `pip install -e .`:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from pulseqfm import model as qfm
from pulseqfm.fourier import nyquist_grid
from pulseqfm.kernels import available_backends
from pulseqfm.model import FourierModel


def _program(mode: str, batch: int):
    m = FourierModel(ansatz=qfm.ansatz_by_name("rot_crx"), mode=mode)
    m = qfm.initialised(m, np.random.default_rng(0))
    template = qfm.circuit_template(m)
    rng = np.random.default_rng(1)
    thetas = rng.uniform(0, 2 * np.pi, size=(batch, qfm.theta_size(m)))
    ext = rng.normal(1.0, 0.1, size=(batch, qfm.extension_size(m))) if mode != "gate" else None
    ang = qfm.leaf_angles(template, thetas, ext)
    mats = qfm.leaf_matrices(template, ang)
    xs = nyquist_grid(qfm.spectrum(m))
    return template, mats, xs


def timeit_best(fn, repeats: int = 5) -> float:
    fn()
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    template, mats, xs = _program("pulse", 181)
    args = (
        template.q0,
        template.q1,
        template.block,
        template.n_blocks,
        template.n_qubits,
        template.enc_scales,
    )
    single = np.ascontiguousarray(mats[:1])
    batch = np.ascontiguousarray(mats)
    rows = []
    for name, impl in backends.items():
        t_single = timeit_best(
            lambda: impl.forward_grid_batch(single, *args, xs, template.obs_diag), 20
        )
        t_batch = timeit_best(lambda: impl.forward_grid_batch(batch, *args, xs, template.obs_diag))
        t_states = timeit_best(lambda: impl.final_states_batch(batch, *args, 0.0))
        rows.append((name, t_single, t_batch, t_states))
    print(f"\nrot_crx pulse mode, {batch.shape[0]} programmes, {xs.size}-point grid")
    print(f"{'backend':<10} {'grid x1':>12} {'grid batch':>12} {'states batch':>13}")
    for name, t1, tb, ts in rows:
        print(f"{name:<10} {t1 * 1e3:>10.3f}ms {tb * 1e3:>10.2f}ms {ts * 1e3:>11.2f}ms")
    if len(rows) == 2:
        base = {name: tb for name, _, tb, _ in rows}
        speedup = base["numpy"] / base["compiled"]
        print(f"\nbatched grid speedup (compiled vs numpy): {speedup:.1f}x")

    # agreement check while we are here
    ref = None
    for name, impl in backends.items():
        val = impl.forward_grid_batch(batch, *args, xs, template.obs_diag)
        if ref is None:
            ref = val
        else:
            print(f"max |compiled - numpy| = {np.max(np.abs(val - ref)):.3e}")


if __name__ == "__main__":
    main()

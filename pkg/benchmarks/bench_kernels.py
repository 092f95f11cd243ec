"""Time the numba and numpy kernel backends on realistic workloads.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--sweep]

Every kernel is run once per backend before timing so numba compilation
(cached on disk after the first run) does not count.  Outputs of the two
backends are compared as well.
"""

import argparse
import math
import time

import numpy as np

from sepdist import _accel, channels, contmodel as cm
from sepdist.qstate import Bipartition, random_separable_matrix


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def workloads():
    eps, alpha = 0.1, 1.0
    vals, vecs = np.linalg.eigh(cm.build_hamiltonian(eps))
    rho = cm.initial_state(alpha).mat
    times = np.linspace(0, 2 * math.pi / eps ** 2, 500)
    idx = _accel.pt_index(cm.DIMS, (False, False, True))
    rng = np.random.default_rng(0)
    part = Bipartition.parse("a|bc")
    inputs = np.stack([random_separable_matrix((2, 2, 2), part, 4, rng) for _ in range(1000)])
    kraus = channels.composed_map().stack()
    h_a, h_b = cm.trotter_halves(eps)
    dt = times[-1] / 256
    hops = np.stack([cm.expm_i(h_a, dt), cm.expm_i(h_b, dt)])
    pattern = np.tile([0, 1], 256)
    evolved = _accel.evolve_batch(vecs, vals, rho, times)
    return {
        "evolve_batch (500 x 12x12)": lambda: _accel.evolve_batch(vecs, vals, rho, times),
        "negativity_batch (500 x 12x12)": lambda: _accel.negativity_batch(evolved, idx),
        f"kraus_apply_batch (1000 x 8x8, {len(kraus)} ops)": lambda: _accel.kraus_apply_batch(kraus, inputs),
        "conjugate_sequence (512 hops)": lambda: _accel.conjugate_sequence(hops, rho, pattern),
    }


def flatten(out):
    if isinstance(out, tuple):
        return np.concatenate([np.ravel(o) for o in out])
    return np.ravel(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sweep", action="store_true", help="also time a 5 x 20 sweep at 500 steps")
    args = ap.parse_args()
    if "numba" not in _accel.BACKENDS:
        raise SystemExit("numba is not installed; nothing to compare")

    jobs = workloads()
    print(f"{'kernel':42s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s} {'max diff':>9s}")
    for name, fn in jobs.items():
        results = {}
        for backend in ("numpy", "numba"):
            _accel.set_backend(backend)
            fn()
            results[backend] = best_of(fn, args.repeat)
        (tn, on), (tb, ob) = results["numpy"], results["numba"]
        diff = np.abs(flatten(on) - flatten(ob)).max()
        print(f"{name:42s} {tn * 1e3:11.3f} {tb * 1e3:11.3f} {tn / tb:8.2f} {diff:9.1e}")

    if args.sweep:
        grid_e, grid_a = np.linspace(0.02, 0.2, 5), np.linspace(0, 20, 20)
        for backend in ("numpy", "numba"):
            _accel.set_backend(backend)
            t, table = best_of(lambda: cm.sweep(grid_e, grid_a, steps=500), 1)
            print(f"sweep 5x20 [{backend}]: {t:.2f} s, feasible eps {table.feasible_epsilons()}")


if __name__ == "__main__":
    main()

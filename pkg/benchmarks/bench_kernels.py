"""Compare the numba and numpy kernel paths.

Run ``python benchmarks/bench_kernels.py``. The first numba call of each
kernel (compilation, or loading the on-disk cache) is excluded from timing.
"""

import argparse
import timeit

import numpy as np

from tmtmp import kernels, oracle
from tmtmp.gap import GapSet, conjugate_set
from tmtmp.kernels import DROP_TOL
from tmtmp.model import solve_model


def cases(seed):
    rng = np.random.default_rng(seed)
    model = solve_model(oracle.moments_of(oracle.random_measure(rng, 40, 4), 6))
    zetas, seg_ok = conjugate_set(GapSet.of((0.2, 2.5))).grid(1024)
    c = np.ascontiguousarray
    scan_args = (
        c(model.space.X, dtype=np.complex128), model.N, model.d, c(model.domain_basis),
        c(model.A_op, dtype=np.complex128), c(model.defect0), c(model.defect_inf),
        c(zetas), DROP_TOL, model.space.floor,
    )
    X = c(model.space.X, dtype=np.complex128)
    gs_args = (np.zeros((X.shape[0], 0), dtype=np.complex128), X, DROP_TOL, model.space.floor)
    w = np.exp(-2j * np.angle(zetas))
    phase_args = (c(w), c(seg_ok), 2 * np.pi * np.arange(4096) / 4096)
    return {"gram_schmidt": gs_args, "zeta_scan": scan_args, "phase_scan": phase_args}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'kernel':<14}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, call_args in cases(args.seed).items():
        fast = getattr(kernels, f"{name}_numba")
        slow = getattr(kernels, f"{name}_numpy")
        fast(*call_args)  # compile / load cache
        t_fast = min(timeit.repeat(lambda: fast(*call_args), number=1, repeat=args.repeat))
        t_slow = min(timeit.repeat(lambda: slow(*call_args), number=1, repeat=args.repeat))
        print(f"{name:<14}{1e3 * t_fast:>12.3f}{1e3 * t_slow:>12.3f}{t_slow / t_fast:>10.1f}x")


if __name__ == "__main__":
    main()

"""Time the numba and numpy flavours of each hot kernel on pipeline-sized inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from modalsmooth import kernels
from modalsmooth._accel import HAVE_NUMBA
from modalsmooth.sh_math import make_grid


def cases():
    grid = make_grid(1.0)
    rng = np.random.default_rng(0)
    steer = kernels.sh_matrix_numpy(grid.theta, grid.phi, 2).conj().T.copy()
    noise = np.linalg.qr(rng.standard_normal((9, 3)) + 1j * rng.standard_normal((9, 3)))[0]
    spectrum = rng.random(grid.shape)
    dims = np.array([10.0, 10.0, 8.0])
    src = np.array([2.0, 2.0, 1.75])
    mic = np.array([5.0, 5.0, 3.0])
    return {
        "sh_matrix (64800 dirs, order 2)": (
            kernels.sh_matrix_numba, kernels.sh_matrix_numpy, (grid.theta, grid.phi, 2)
        ),
        "projection_power (9x3 on 64800)": (
            kernels.projection_power_numba, kernels.projection_power_numpy, (noise, steer)
        ),
        "local_maxima (180x360)": (kernels.local_maxima_numba, kernels.local_maxima_numpy, (spectrum,)),
        "image_sources (0.1 s)": (
            kernels.image_sources_numba, kernels.image_sources_numpy, (dims, src, mic, 34.3)
        ),
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not HAVE_NUMBA:
        print("numba is not installed; the numba column times the plain-python loops")
    print(f"{'kernel':36s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'ratio':>7s}")
    for name, (fast, ref, call_args) in cases().items():
        fast(*call_args)  # compile outside the timing
        t_fast = min(timeit.repeat(lambda: fast(*call_args), number=1, repeat=args.repeat))
        t_ref = min(timeit.repeat(lambda: ref(*call_args), number=1, repeat=args.repeat))
        print(f"{name:36s} {t_fast * 1e3:11.2f} {t_ref * 1e3:11.2f} {t_ref / t_fast:7.2f}")


if __name__ == "__main__":
    main()

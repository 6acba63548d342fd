"""Compare the compiled and pure-numpy kernel backends.

Times the hot kernels and the full pipeline on synthetic pages, once per
backend, and prints a table with the speedup of the compiled path.

    python3 benchmarks/bench_backends.py --size 512 --repeats 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from mangahue import kernels
from mangahue.pipeline import PipelineInput, PipelineParams, run
from mangahue.raster import BinaryImage, ColorImage, GreyImage
from mangahue.segment import BallSchedule, trapped_ball_segment


def cartoon_page(size: int, cell: int = 128) -> tuple[np.ndarray, np.ndarray]:
    """A grid page (mono, truth) of flat cells with 2 px black outlines."""
    palette = [(190, 80, 70), (80, 170, 90), (75, 90, 180), (180, 170, 70),
               (160, 80, 160), (80, 160, 160), (180, 120, 70), (120, 120, 120)]
    truth = np.zeros((size, size, 3), np.uint8)
    n = max(1, size // cell)
    for r in range(n):
        for c in range(n):
            truth[r * cell:(r + 1) * cell, c * cell:(c + 1) * cell] = \
                palette[(r * n + c) % len(palette)]
    edges = np.zeros((size, size), bool)
    edges[:2, :] = edges[-2:, :] = edges[:, :2] = edges[:, -2:] = True
    for k in range(1, n):
        edges[k * cell - 1:k * cell + 1, :] = True
        edges[:, k * cell - 1:k * cell + 1] = True
    truth[edges] = 0
    mono = np.full((size, size), 255, np.uint8)
    mono[edges] = 0
    return mono, truth


def maze(size: int) -> np.ndarray:
    rng = np.random.default_rng(0)
    lines = rng.random((size, size)) < 0.35
    lines[0, :] = lines[-1, :] = lines[:, 0] = lines[:, -1] = True
    return lines


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def workloads(size: int):
    lines = maze(size)
    free = ~lines
    grey = np.random.default_rng(1).integers(0, 256, (size, size)).astype(np.uint8)
    labels = kernels.label_components(free, 4)[0]
    # keep every 4th row of labels so expansion has real distance to cover
    sparse = np.where((np.arange(size)[:, None] % 4 == 0), labels, 0)
    weights = np.array([0.25, 0.5, 0.25])
    mono, truth = cartoon_page(size, cell=32)
    inp = PipelineInput(target_mono=GreyImage(mono), hint=ColorImage(truth))
    params = PipelineParams(k_colors=12)

    yield "window_min d=4", lambda: kernels.window_min(
        labels.astype(np.int64), 4, 1)
    yield "window_all d=4", lambda: kernels.window_all(free, 4, 1)
    yield "label_components", lambda: kernels.label_components(free, 4)
    yield "expand_labels", lambda: kernels.expand_labels(sparse.copy(), free)
    yield "blur_separable", lambda: kernels.blur_separable(
        grey.astype(np.float64), weights)
    yield "trapped_ball maze", lambda: trapped_ball_segment(
        BinaryImage(lines), BallSchedule(3))
    yield "full pipeline", lambda: run(inp, params)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=512,
                        help="page side length in pixels (default 512)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="runs per measurement; best is kept (default 3)")
    args = parser.parse_args()

    backends = ["numpy"] + (["numba"] if kernels.HAS_NUMBA else [])
    if not kernels.HAS_NUMBA:
        print("numba is not importable; timing the numpy backend only")

    results: dict[str, dict[str, float]] = {}
    for backend in backends:
        kernels.set_backend(backend)
        if backend == "numba":
            kernels.warmup()
        for name, fn in workloads(args.size):
            fn()  # one untimed run so caches and allocator are settled
            results.setdefault(name, {})[backend] = best_of(fn, args.repeats)

    width = max(len(name) for name in results)
    header = f"{'workload':<{width}}  " + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(f"\npage size {args.size}x{args.size}, best of {args.repeats}\n")
    print(header)
    print("-" * len(header))
    for name, timings in results.items():
        row = f"{name:<{width}}  " + "".join(
            f"{timings[b] * 1000:>10.2f}ms" for b in backends)
        if len(backends) == 2:
            row += f"{timings['numpy'] / timings['numba']:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

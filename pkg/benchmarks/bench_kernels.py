#!/usr/bin/env python3
"""Time the numba kernels against their pure-numpy fallbacks.

Runs each hot kernel on synthetic data shaped like one 1280x720 export
(19 classes) and prints per-call wall time plus the speedup. The same
comparison at package level: run the suite or CLI with ANOMSEG_NUMBA=0 to
force the numpy path end to end.

    python3 benchmarks/bench_kernels.py --repeats 5
"""

import argparse
import time

import numpy as np

from anomseg import _kernels as K


def time_call(fn, *args, repeats=5):
    fn(*args)  # warmup / JIT
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--height", type=int, default=720)
    parser.add_argument("--width", type=int, default=1280)
    parser.add_argument("--classes", type=int, default=19)
    parser.add_argument("--bins", type=int, default=4096)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    logits = rng.normal(size=(args.classes, args.height, args.width)).astype(np.float32)
    scores = rng.random(args.height * args.width).astype(np.float32)
    labels = rng.choice([0, 1, 255], size=scores.size,
                        p=[0.9, 0.07, 0.03]).astype(np.uint8)
    edges = np.linspace(0.0, 1.0, args.bins + 1)

    def fresh_hists():
        return (np.zeros(args.bins, np.int64), np.zeros(args.bins, np.int64),
                np.zeros(5, np.int64))

    cases = [
        ("channel_max", K.channel_max_numpy, K.channel_max_numba, (logits,)),
        ("softmax_max", K.softmax_max_numpy, K.softmax_max_numba, (logits, 1.0)),
        ("softmax_entropy", K.softmax_entropy_numpy, K.softmax_entropy_numba,
         (logits,)),
    ]

    npix = args.height * args.width
    print(f"kernel benchmark: {args.classes}x{args.height}x{args.width} logits, "
          f"{npix / 1e6:.2f}M pixels, B={args.bins}")
    print(f"numba available: {K.NUMBA_AVAILABLE}, enabled: {K.NUMBA_ENABLED}")
    header = f"{'kernel':<18}{'numpy':>12}{'numba':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for name, np_fn, nb_fn, call_args in cases:
        t_np = time_call(np_fn, *call_args, repeats=args.repeats)
        if K.NUMBA_AVAILABLE:
            t_nb = time_call(nb_fn, *call_args, repeats=args.repeats)
            check_a, check_b = np_fn(*call_args), nb_fn(*call_args)
            assert np.allclose(check_a, check_b, rtol=1e-10, atol=1e-12)
            print(f"{name:<18}{t_np * 1e3:>10.1f}ms{t_nb * 1e3:>10.1f}ms"
                  f"{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name:<18}{t_np * 1e3:>10.1f}ms{'n/a':>12}{'':>10}")

    # binning mutates its histograms; rebuild them per timing run
    def run_binning(fn):
        hists = fresh_hists()
        fn(scores, labels, edges, *hists)  # warmup
        best = np.inf
        for _ in range(args.repeats):
            hists = fresh_hists()
            start = time.perf_counter()
            fn(scores, labels, edges, *hists)
            best = min(best, time.perf_counter() - start)
        return best, hists

    t_np, hists_np = run_binning(K.bin_counts_numpy)
    if K.NUMBA_AVAILABLE:
        t_nb, hists_nb = run_binning(K.bin_counts_numba)
        assert all(np.array_equal(a, b) for a, b in zip(hists_np, hists_nb))
        print(f"{'bin_counts':<18}{t_np * 1e3:>10.1f}ms{t_nb * 1e3:>10.1f}ms"
              f"{t_np / t_nb:>9.1f}x")
    else:
        print(f"{'bin_counts':<18}{t_np * 1e3:>10.1f}ms{'n/a':>12}")


if __name__ == "__main__":
    main()

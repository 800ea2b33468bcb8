"""Time the compiled folding kernels against the pure-Python fallback.

    python benchmarks/bench_fold.py --lengths 60 120 240 --repeat 3
"""
import argparse
import random
import time

from mrnaga.folding import KERNEL_BACKEND, default_model, fold_mfe, fold_nussinov
from mrnaga.folding import _kernels_py

try:
    from mrnaga.folding import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lengths", type=int, nargs="+", default=[60, 120, 240])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    model = default_model()
    kernels = [("python", _kernels_py)]
    if _kernels is not None:
        kernels.insert(0, ("compiled", _kernels))
    print(f"active backend: {KERNEL_BACKEND}")
    print(f"{'length':>6}  {'algorithm':<9}  " + "  ".join(f"{name + ' s':>11}" for name, _ in kernels)
          + ("  speedup" if len(kernels) == 2 else ""))

    for n in args.lengths:
        seq = "".join(rng.choice("ACGU") for _ in range(n))
        for algo, run in (("nussinov", lambda k: fold_nussinov(seq, kernel=k)),
                          ("mfe", lambda k: fold_mfe(seq, model, max_length=None, kernel=k))):
            results = [run(k) for _, k in kernels]
            # both paths must agree before their timings mean anything
            assert all(r == results[0] for r in results), (n, algo)
            times = [best_of(lambda k=k: run(k), args.repeat) for _, k in kernels]
            line = f"{n:>6}  {algo:<9}  " + "  ".join(f"{t:>11.4f}" for t in times)
            if len(times) == 2:
                line += f"  {times[1] / times[0]:>6.1f}x"
            print(line, flush=True)


if __name__ == "__main__":
    main()

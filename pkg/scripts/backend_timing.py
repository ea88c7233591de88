"""Compare the pair-removal and signature-refinement backends on random LTSs.

Prints one row per size bucket: mean time of each backend and whether the
partitions agreed on every instance.
"""
import argparse
import random
import statistics
import time

from ccsdiv.equivalence import gfp_dpbb, refine_dpbb
from ccsdiv.lts import Lts
from ccsdiv.syntax import TAU


def random_lts(rng, n, density=1.5, tau_share=0.45):
    edges = []
    for _ in range(int(density * n)):
        a = TAU if rng.random() < tau_share else rng.choice("abc")
        edges.append((rng.randrange(n), a, rng.randrange(n)))
    return Lts.from_edges(n, edges)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 30, 100, 300])
    ap.add_argument("--per-size", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    print(f"{'states':>7} {'gfp ms':>9} {'refine ms':>10} agree")
    for n in args.sizes:
        tg, tr, agree = [], [], True
        for _ in range(args.per_size):
            l = random_lts(rng, n)
            t0 = time.perf_counter()
            g = gfp_dpbb(l)
            t1 = time.perf_counter()
            r = refine_dpbb(l)
            t2 = time.perf_counter()
            tg.append(t1 - t0)
            tr.append(t2 - t1)
            agree &= g == r
        print(f"{n:>7} {1e3 * statistics.mean(tg):>9.2f} {1e3 * statistics.mean(tr):>10.2f} {agree}")


if __name__ == "__main__":
    main()

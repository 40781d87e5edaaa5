"""Ratio of the k-th root of f_p to its leading-order location -k p^(1-k).

    python3 scripts/root_asymptotics.py --p 0.5 --m 20
"""
import argparse

from qrclique.spectrum import asymptotic_seed, find_roots_entire


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", default="0.5")
    ap.add_argument("--m", type=int, default=20)
    ap.add_argument("--precision-bits", type=int, default=128)
    args = ap.parse_args()

    roots = find_roots_entire(args.p, args.m, args.precision_bits)
    print(f"{'k':>3} {'a_k':>26} {'-k p^(1-k)':>16} {'ratio':>10}")
    for k, a in enumerate(roots.roots, start=1):
        seed = asymptotic_seed(k, args.p, args.precision_bits)
        print(f"{k:>3} {float(a):>26.15g} {float(seed):>16.6g} {float(a / seed):>10.6f}")


if __name__ == "__main__":
    main()

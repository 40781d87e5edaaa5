"""Clique-count deviation of the rounded multipartite construction versus n.

Part sizes are integers, so each factor |V_i| carries an error of up to
1/(c_i n) relative to c_i n.  This prints, for every n on a grid, the
largest |rel_dev| over K_2..K_k and the audit tolerance max(0.02, 3 j^2/n),
then the grid values of n at which every row fits.  The deviation is not
monotone in n: it depends on how the smallest parts happen to round.

    python3 scripts/rounding_deviation.py --p 0.25 --k 5
"""
import argparse
import math
from fractions import Fraction

from qrclique.audit import AuditConfig, elementary_symmetric_int
from qrclique.ensemble import largest_remainder
from qrclique.numeric import to_exact
from qrclique.spectrum import find_roots_truncated, roots_to_weights


def deviations(sizes, p, k, n):
    out = []
    for j in range(2, k + 1):
        count = math.factorial(j) * elementary_symmetric_int(sizes, j)
        out.append(float(count / (p ** math.comb(j, 2) * n**j) - 1))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", default="0.25")
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--n", type=int, nargs="*",
                    default=[1000, 2000, 3000, 5000, 10000, 20000, 50000, 100000])
    args = ap.parse_args()

    p = Fraction(args.p)
    weights = roots_to_weights(find_roots_truncated(args.p, args.k)).weights
    exact = [to_exact(c) for c in weights]
    cfg = AuditConfig()
    print("c_i n at n=1:", " ".join(f"{float(c):.5f}" for c in exact))
    fits = []
    for n in args.n:
        sizes = largest_remainder(exact, n)
        devs = deviations(sizes, p, args.k, n)
        ok = all(abs(d) <= cfg.clique_tolerance(j, n) for j, d in enumerate(devs, start=2))
        if ok:
            fits.append(n)
        cells = " ".join(f"K{j}:{d:+.4f}" for j, d in enumerate(devs, start=2))
        print(f"n={n:>7} sizes={sizes} {cells} {'ok' if ok else 'FAIL'}")
    print("grid n with every row in tolerance:", fits)


if __name__ == "__main__":
    main()

"""Zeros on the critical line, their rotation numbers and continued fractions.

At a simple zero 1/2 + i*gamma of zeta the nu-map has multiplier
exp(2 pi i theta) with gamma = 1/(2 tan pi theta). The continued fraction of
theta is only trustworthy up to the precision of gamma, so each row reports
how many quotients are certified.
"""
import argparse

from zetadyn import rotation as R
from zetadyn.zeros import count_zeros_rectangle, find_zeros


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--digits", type=int, nargs="+", default=[30, 70],
                    help="precisions for the continued fractions")
    args = ap.parse_args()

    recs = find_zeros(0, 50, 14)
    print(f"{len(recs)} zeros with 0 < gamma < 50; argument principle counts "
          f"{count_zeros_rectangle(0.5, 50.0)}")
    for r in recs[:4]:
        rot = R.gamma_to_theta(r.gamma)
        print(f"  n={r.index:2d}  gamma={r.gamma:.10f}  theta={rot.theta:.9g}")

    for digits in args.digits:
        cache = R.ensure_cached(recs, [1, 2, 3, 4, 10], digits)
        print(f"\ncontinued fractions from {digits}-digit zeros ('?' marks uncertified terms)")
        for n in (1, 2, 3, 4, 10):
            row = R.rotation_row(n, digits, cache, max_terms=50)
            summary = row.expansion.bounded_type_summary()
            print(f"  n={n:2d}  certified={row.certified_count:2d}  max={summary['max']:5d}  "
                  f"{row.expansion.format()}")


if __name__ == "__main__":
    main()

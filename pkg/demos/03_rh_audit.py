"""Fixed-point audits at computed zeros.

A zero alpha of order m is an indifferent fixed point of nu_zeta exactly when
Re(m alpha) = 1/2, that is, when it is simple and on the critical line. The
audit checks this at the first computed zeros for nu_zeta and nu_xi, shows
how a planted off-line zero is caught, and scans a Newton stripe. It verifies
the equivalences at computed zeros; it proves nothing about the rest.
"""
import argparse

from zetadyn import family as F
from zetadyn.audit import rh_audit
from zetadyn.dynamics import MapKind
from zetadyn.zeros import zeros_up_to_index


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--zeros", type=int, default=20)
    args = ap.parse_args()
    zeros = zeros_up_to_index(args.zeros, 14)

    for g in (F.zeta(), F.xi()):
        v = rh_audit(zeros, g, MapKind.nu())
        print(f"nu_{g.name}: {v.summary}")
        print(f"  {v.reason}; max |Re iota - m/2| = {v.max_re_iota_deviation:.1e}")
        if v.symmetry_residual is not None:
            print(f"  iota(alpha) + iota(1 - alpha) = m within {v.symmetry_residual:.1e}")

    # a planted zero at 0.7 + 10i off the critical line
    v = rh_audit(zeros[:5], F.chi(1, 0.7 + 10j), MapKind.nu())
    print(f"\nnu_chi with an extra zero at 0.7+10i: {v.summary}\n  {v.reason}")

    v = rh_audit(zeros[:10], F.zeta(), MapKind.newton(), scan_size=(60, 120), scan_height=50)
    print(f"\nNewton stripe scan, 1/2 < Re z < 1, 0 < Im z < 50: {v.summary}")
    print(f"  {v.reason}")


if __name__ == "__main__":
    main()

"""Fixed points of nu-maps and Newton maps, with two independent index computations.

The closed-form index at a zero of order m is m*alpha for the nu-map and m/kappa
for the relaxed Newton map. The contour quadrature evaluates
(1/2 pi i) \\oint dz / (z - f(z)) directly, so agreement between the two is a
check on both.
"""
from zetadyn import family as F
from zetadyn.dynamics import MapKind, fixed_point_report, index_quadrature
from zetadyn.zeros import zeros_up_to_index


def show(title, g, kind, points):
    print(title)
    for a in points:
        r = fixed_point_report(g, kind, a, polish=True)
        print(f"  alpha={complex(r.alpha):.6g}  {r.source:4s} m={r.order}  "
              f"lambda={complex(r.multiplier):.6g}  iota={complex(r.index_closed_form):.6g}  "
              f"|iota - quadrature|={abs(r.index_closed_form - r.index_quadrature):.1e}  "
              f"{r.classification}")


def main():
    nu = MapKind.nu()
    example = F.rational_from_roots([(-1, 1), (0.5, 2)], [(0, 3), (1, 1)])
    show("(z+1)(z-1/2)^2 / (z^3 (z-1)) under its nu-map:", example, nu, [-1, 0.5, 1])

    a1 = zeros_up_to_index(1, 14)[0].alpha
    show("\nzeta under its nu-map: the pole, two trivial zeros and the first zero:",
         F.zeta(), nu, [1, -2, -4, a1])
    show("\nzeta under the relaxed Newton map with kappa = 0.8 - 0.2i:",
         F.zeta(), MapKind.newton(0.8 - 0.2j), [-2, a1])

    print("\nmultiplier-1 fixed points: z - z^2 + K z^3 has index K at 0")
    for K in (1, 2 + 1j, -3):
        print(f"  K={K}:  quadrature gives {index_quadrature(lambda z: z - z * z + K * z ** 3, 0):.12g}")

    g = F.chi(1, 1.2)
    show("\n(z - 1.2)(z - 1) zeta(z): the extra zero at 1.2 is attracting since Re(m a) > 1/2:",
         g, nu, [1.2])


if __name__ == "__main__":
    main()

"""Newton basins of zeta and a recurrent nu_zeta orbit near the first zero.

Writes two PPM images with JSON sidecars: the Newton basins over a
window containing the first zeros, and the nu_zeta raster around the first
zero with a long orbit drawn on top. Pixels near an indifferent zero neither
converge nor escape, and the orbit traces an invariant curve around it.
"""
import argparse
from pathlib import Path

from zetadyn import basin as B, family as F
from zetadyn.dynamics import MapKind, orbit
from zetadyn.zeros import zeros_up_to_index


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("demo_out"))
    ap.add_argument("--size", type=int, default=160, help="image height in pixels")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    zeros = zeros_up_to_index(8, 14)
    targets = [z.alpha for z in zeros] + [-2 * k for k in range(1, 40)]

    h = args.size
    spec = B.RenderSpec(F.zeta(), MapKind.newton(), (-20, 10, -1, 39), h * 3 // 4, h,
                        known_targets=targets)
    raster = B.render(spec)
    path = B.emit_image(raster, B.Palette(boundary=(255, 255, 255)), args.out / "newton_zeta.ppm")
    print(f"Newton basins: {raster.counts()} -> {path}")

    a = zeros[0].alpha
    spec = B.RenderSpec(F.zeta(), MapKind.nu(), (a.real - 0.6, a.real + 0.6, a.imag - 0.6,
                                                  a.imag + 0.6), h, h, max_iter=100)
    raster = B.render(spec)
    o = orbit(spec.g, spec.kind, a + 0.1, max_iter=3000)
    spread = max(abs(p - a) for p in o.points) / min(abs(p - a) for p in o.points[1:])
    path = B.emit_image(raster, B.Palette(exhausted=(20, 20, 40)), args.out / "nu_zeta_orbit.ppm",
                        overlay=o.points)
    print(f"nu_zeta near the first zero: {raster.counts()}")
    print(f"orbit of alpha + 0.1: {o.iterations} steps, outcome {o.outcome}, "
          f"max/min distance to alpha {spread:.2f} -> {path}")


if __name__ == "__main__":
    main()

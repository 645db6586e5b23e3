"""Basin rasters for Newton and nu maps, and PPM/PNG emission."""
from __future__ import annotations

import colorsys
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (CONVERGED, ESCAPED, EXHAUSTED, POLE, MapKind, iterate_batch,
                       map_arrays)
from .errors import BudgetExceeded
from .family import AnalyticFunction
from . import family as fam

DEFAULT_BUDGET = 4_000_000
TILE_ROWS = 32


@dataclass(frozen=True)
class RenderSpec:
    g: AnalyticFunction
    kind: MapKind
    # (re_lo, re_hi, im_lo, im_hi)
    region: tuple
    width: int
    height: int
    max_iter: int = 200
    conv_tol: float = 1e-8
    escape_radius: float = 1e6
    known_targets: tuple = ()
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        re_lo, re_hi, im_lo, im_hi = (float(x) for x in self.region)
        object.__setattr__(self, "region", (re_lo, re_hi, im_lo, im_hi))
        object.__setattr__(self, "known_targets", tuple(complex(t) for t in self.known_targets))
        if not (re_lo < re_hi and im_lo < im_hi):
            raise ValueError("region needs re_lo < re_hi and im_lo < im_hi")
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.conv_tol > 0 or not self.escape_radius > 0:
            raise ValueError("conv_tol and escape_radius must be positive")
        if self.width * self.height > self.budget:
            raise BudgetExceeded(f"{self.width}x{self.height} exceeds the pixel budget {self.budget}")

    @property
    def pitch(self) -> tuple[float, float]:
        re_lo, re_hi, im_lo, im_hi = self.region
        return (re_hi - re_lo) / self.width, (im_hi - im_lo) / self.height

    def pixel_centers(self, rows: slice = slice(None)) -> np.ndarray:
        """Complex pixel centers, row 0 at the top (largest Im)."""
        re_lo, _, _, im_hi = self.region
        dx, dy = self.pitch
        x = re_lo + (np.arange(self.width) + 0.5) * dx
        y = im_hi - (np.arange(self.height)[rows] + 0.5) * dy
        return x[None, :] + 1j * y[:, None]

    def to_dict(self) -> dict:
        return {
            "function": self.g.to_dict(),
            "map": self.kind.to_dict(),
            "region": list(self.region),
            "width": self.width,
            "height": self.height,
            "max_iter": self.max_iter,
            "conv_tol": self.conv_tol,
            "escape_radius": self.escape_radius,
            "known_targets": [[t.real, t.imag] for t in self.known_targets],
            "budget": self.budget,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RenderSpec":
        m = d.get("map", {"kind": "nu"})
        kind = MapKind.nu() if m["kind"] == "nu" else MapKind.newton(complex(*m.get("kappa", [1, 0])))
        g = d["function"]
        g = fam.from_dict(g) if isinstance(g, dict) else fam.by_name(g)
        return cls(g, kind, tuple(d["region"]), int(d["width"]), int(d["height"]),
                   int(d.get("max_iter", 200)), float(d.get("conv_tol", 1e-8)),
                   float(d.get("escape_radius", 1e6)),
                   tuple(complex(*t) for t in d.get("known_targets", [])),
                   int(d.get("budget", DEFAULT_BUDGET)))


@dataclass(eq=False)
class BasinRaster:
    spec: RenderSpec
    outcome: np.ndarray     # int8, CONVERGED / ESCAPED / POLE / EXHAUSTED
    target: np.ndarray      # int32 index into ``targets``, -1 unless converged
    iterations: np.ndarray  # int32
    final: np.ndarray       # last orbit point per pixel
    targets: tuple = ()     # known targets first, then discovered ones by (Re, Im)
    meta: dict = field(default_factory=dict)

    def identical(self, other: "BasinRaster") -> bool:
        return (self.spec == other.spec and self.targets == other.targets
                and np.array_equal(self.outcome, other.outcome)
                and np.array_equal(self.target, other.target)
                and np.array_equal(self.iterations, other.iterations))

    def counts(self) -> dict:
        names = ("converged", "escaped", "pole", "exhausted")
        return {n: int((self.outcome == i).sum()) for i, n in enumerate(names)}


def _render_rows(spec: RenderSpec, rows: slice):
    z0 = spec.pixel_centers(rows)
    res = iterate_batch(spec.g, spec.kind, z0.ravel(), spec.known_targets, spec.max_iter,
                        spec.conv_tol, spec.escape_radius)
    shape = z0.shape
    return tuple(res[k].reshape(shape) for k in ("outcome", "target", "iterations", "final"))


def _discover(final: np.ndarray, mask: np.ndarray, tol: float):
    """Cluster limit points within ``tol``; returns (centers, labels) with
    centers sorted by (Re, Im)."""
    pts = final[mask]
    if pts.size == 0:
        return [], np.zeros(0, dtype=np.int32)
    keys = np.stack([np.round(pts.real / tol), np.round(pts.imag / tol)], axis=1)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.ravel()
    # merge cells in first-discovery order
    order = np.argsort(first, kind="stable")
    centers: list[complex] = []
    cell_label = np.empty(len(first), dtype=np.int64)
    for c in order:
        p = pts[first[c]]
        for j, q in enumerate(centers):
            if abs(p - q) < tol:
                cell_label[c] = j
                break
        else:
            cell_label[c] = len(centers)
            centers.append(complex(p))
    perm = sorted(range(len(centers)), key=lambda j: (centers[j].real, centers[j].imag))
    rank = np.empty(len(centers), dtype=np.int32)
    rank[perm] = np.arange(len(centers), dtype=np.int32)
    return [centers[j] for j in perm], rank[cell_label[inverse]]


def render(spec: RenderSpec, threads: int = 1, tile_rows: int = TILE_ROWS) -> BasinRaster:
    """Iterate every pixel center; unregistered limits become discovered targets."""
    tiles = [slice(r, min(r + tile_rows, spec.height)) for r in range(0, spec.height, tile_rows)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda s: _render_rows(spec, s), tiles))
    else:
        parts = [_render_rows(spec, s) for s in tiles]
    outcome, target, iters, final = (np.concatenate([p[i] for p in parts]) for i in range(4))
    known = list(spec.known_targets)
    unlabelled = (outcome == CONVERGED) & (target < 0)
    found, labels = _discover(final, unlabelled, spec.conv_tol)
    target[unlabelled] = labels + len(known)
    return BasinRaster(spec, outcome, target, iters, final, tuple(known + found))


def label_drift(raster: BasinRaster, extra: int = 5) -> float:
    """Max distance to the labelled target after ``extra`` more iterations."""
    conv = raster.outcome == CONVERGED
    if not conv.any():
        return 0.0
    z = raster.final[conv]
    t = np.asarray(raster.targets, dtype=complex)[raster.target[conv]]
    spec = raster.spec
    worst = 0.0
    for _ in range(extra):
        z = map_arrays(spec.g, spec.kind, z)
        worst = max(worst, float(np.max(np.abs(z - t))))
    return worst


def boundary_estimate(raster: BasinRaster) -> np.ndarray:
    """Pixels whose 4-neighbourhood holds at least two distinct labels."""
    lab = raster.outcome.astype(np.int64) * (len(raster.targets) + 2) + raster.target + 1
    return boundary_of_labels(lab)


def boundary_of_labels(lab: np.ndarray) -> np.ndarray:
    mask = np.zeros(lab.shape, bool)
    dv = lab[1:, :] != lab[:-1, :]
    dh = lab[:, 1:] != lab[:, :-1]
    mask[1:, :] |= dv
    mask[:-1, :] |= dv
    mask[:, 1:] |= dh
    mask[:, :-1] |= dh
    return mask


# -------------------------------------------------------------------- images

def default_target_colors(n: int):
    """Well separated hues by golden-angle stepping."""
    out = []
    for k in range(n):
        h = (k * 0.618033988749895) % 1.0
        r, g, b = colorsys.hsv_to_rgb(h, 0.75, 0.95)
        out.append((round(255 * r), round(255 * g), round(255 * b)))
    return tuple(out)


@dataclass(frozen=True)
class Palette:
    """Colours for targets and non-converged outcomes.

    ``shade`` darkens converged pixels with the iteration count;
    ``grayscale`` ignores targets and maps iterations to luma, few
    iterations bright.
    """

    target_colors: tuple = ()
    escaped: tuple = (0, 0, 0)
    pole: tuple = (255, 255, 255)
    exhausted: tuple = (48, 48, 48)
    boundary: tuple | None = None
    shade: bool = False
    grayscale: bool = False

    def rgb(self, raster: BasinRaster) -> np.ndarray:
        h, w = raster.outcome.shape
        it = raster.iterations.astype(float)
        if self.grayscale:
            luma = np.round(255 * (1 - it / raster.spec.max_iter)).astype(np.uint8)
            return np.repeat(luma[:, :, None], 3, axis=2)
        img = np.zeros((h, w, 3), dtype=np.uint8)
        n = len(raster.targets)
        colors = list(self.target_colors) or list(default_target_colors(max(n, 1)))
        table = np.array([colors[k % len(colors)] for k in range(max(n, 1))], dtype=float)
        conv = raster.outcome == CONVERGED
        if conv.any():
            c = table[raster.target[conv]]
            if self.shade:
                f = 1 - 0.7 * np.sqrt(it[conv] / raster.spec.max_iter)
                c = c * f[:, None]
            img[conv] = np.round(c).astype(np.uint8)
        img[raster.outcome == ESCAPED] = self.escaped
        img[raster.outcome == POLE] = self.pole
        img[raster.outcome == EXHAUSTED] = self.exhausted
        if self.boundary is not None:
            img[boundary_estimate(raster)] = self.boundary
        return img


def overlay_points(img: np.ndarray, spec: RenderSpec, points, color=(255, 255, 255)) -> int:
    """Paint orbit points into an RGB array; returns how many fell inside."""
    re_lo, _, _, im_hi = spec.region
    dx, dy = spec.pitch
    pts = np.asarray(list(points), dtype=complex)
    if pts.size == 0:
        return 0
    col = np.floor((pts.real - re_lo) / dx).astype(np.int64)
    row = np.floor((im_hi - pts.imag) / dy).astype(np.int64)
    ok = (col >= 0) & (col < spec.width) & (row >= 0) & (row < spec.height)
    img[row[ok], col[ok]] = color
    return int(ok.sum())


def ppm_bytes(img: np.ndarray) -> bytes:
    """Binary P6 pixmap of an (H, W, 3) uint8 array."""
    h, w, _ = img.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(img, dtype=np.uint8).tobytes()


def emit_image(raster: BasinRaster, palette: Palette | None, path, overlay=None,
               overlay_color=(255, 255, 255), sidecar: bool = True) -> str:
    """Write the raster as PPM (or PNG if ``path`` ends in .png).

    ``overlay`` is an optional sequence of orbit points. With ``sidecar``
    the RenderSpec and target list go to ``path + '.json'``.
    """
    img = (palette or Palette()).rgb(raster)
    if overlay is not None:
        overlay_points(img, raster.spec, overlay, overlay_color)
    path = os.fspath(path)
    if path.lower().endswith(".png"):
        from PIL import Image

        Image.fromarray(img, "RGB").save(path, format="PNG")
    else:
        with open(path, "wb") as fh:
            fh.write(ppm_bytes(img))
    if sidecar:
        meta = {"spec": raster.spec.to_dict(),
                "targets": [[t.real, t.imag] for t in raster.targets],
                "counts": raster.counts()}
        with open(path + ".json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return path

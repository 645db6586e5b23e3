import json
import math

import numpy as np
import pytest

from zetadyn import basin as B, dynamics as D, family as F
from zetadyn.dynamics import CONVERGED, MapKind
from zetadyn.errors import BudgetExceeded

NEWTON = MapKind.newton()


@pytest.fixture(scope="module")
def cosh_raster():
    spec = B.RenderSpec(F.cosh(), NEWTON, (0, 40, -1, 39), 48, 48)
    return B.render(spec)


@pytest.fixture(scope="module")
def zeta_raster(first_zeros):
    targets = [r.alpha for r in first_zeros[:6]]
    spec = B.RenderSpec(F.zeta(), NEWTON, (-2, 3, 10, 35), 40, 60, known_targets=targets)
    return B.render(spec)


def _synthetic(outcome, target, iterations=None, max_iter=10):
    h, w = np.shape(outcome)
    spec = B.RenderSpec(F.cosh(), NEWTON, (0, 1, 0, 1), w, h, max_iter=max_iter)
    it = np.zeros((h, w), np.int32) if iterations is None else np.asarray(iterations, np.int32)
    ntar = int(np.max(target)) + 1 if np.max(target) >= 0 else 0
    return B.BasinRaster(spec, np.asarray(outcome, np.int8), np.asarray(target, np.int32), it,
                         np.zeros((h, w), complex), tuple(complex(k) for k in range(ntar)))


def test_spec_validation():
    g = F.cosh()
    with pytest.raises(ValueError):
        B.RenderSpec(g, NEWTON, (1, 0, 0, 1), 2, 2)
    with pytest.raises(ValueError):
        B.RenderSpec(g, NEWTON, (0, 1, 0, 1), 0, 2)
    with pytest.raises(BudgetExceeded):
        B.RenderSpec(g, NEWTON, (0, 1, 0, 1), 2000, 2000, budget=1_000_000)


def test_pixel_centers_orientation():
    spec = B.RenderSpec(F.cosh(), NEWTON, (0, 4, 0, 2), 4, 2)
    c = spec.pixel_centers()
    assert c[0, 0] == 0.5 + 1.5j and c[1, 3] == 3.5 + 0.5j


def test_wide_grid_disks_converge_fast(first_zeros):
    # the 800x1067 grid over [-20,10]x[-1,39], iterated only inside radius-0.1 disks
    zeros4 = [r.alpha for r in first_zeros[:4]]
    spec = B.RenderSpec(F.zeta(), NEWTON, (-20, 10, -1, 39), 800, 1067, known_targets=zeros4)
    centers = spec.pixel_centers()
    for k, a in enumerate(zeros4):
        pix = centers[np.abs(centers - a) < 0.1]
        assert pix.size > 10
        res = D.iterate_batch(spec.g, spec.kind, pix, spec.known_targets, spec.max_iter,
                              spec.conv_tol, spec.escape_radius)
        assert np.all(res["outcome"] == CONVERGED)
        assert np.all(res["target"] == k)
        assert res["iterations"].max() <= 12


def test_cosh_targets_are_its_zeros(cosh_raster):
    conv = cosh_raster.outcome == CONVERGED
    assert conv.mean() > 0.9
    tol = cosh_raster.spec.conv_tol
    for t in np.unique(cosh_raster.target[conv]):
        z = cosh_raster.targets[t]
        k = round(z.imag / math.pi - 0.5)
        assert abs(z - 1j * math.pi * (k + 0.5)) < tol
    # discovered targets are sorted by (Re, Im)
    keys = [(t.real, t.imag) for t in cosh_raster.targets]
    assert keys == sorted(keys)


def test_single_pixel_at_zero(first_zeros):
    a = first_zeros[0].alpha
    spec = B.RenderSpec(F.zeta(), NEWTON, (a.real - 0.01, a.real + 0.01, a.imag - 0.01, a.imag + 0.01),
                        1, 1, known_targets=[a])
    r = B.render(spec)
    assert r.outcome[0, 0] == CONVERGED and r.target[0, 0] == 0 and r.iterations[0, 0] == 0


def test_boundary_examples(zeta_raster):
    uniform = _synthetic(np.zeros((5, 6)), np.zeros((5, 6)))
    assert not B.boundary_estimate(uniform).any()
    checker = (np.indices((6, 7)).sum(axis=0) % 2)
    assert B.boundary_estimate(_synthetic(np.zeros((6, 7)), checker)).all()
    mask = B.boundary_estimate(zeta_raster)
    assert mask.any() and not mask.all()


def test_labels_are_sound(zeta_raster, cosh_raster):
    for r in (zeta_raster, cosh_raster):
        assert B.label_drift(r, 5) <= 10 * r.spec.conv_tol
        assert np.all(r.iterations <= r.spec.max_iter)
        conv = r.outcome == CONVERGED
        assert np.all(r.target[conv] >= 0) and np.all(r.target[~conv] == -1)


def test_basin_openness(zeta_raster):
    r = zeta_raster
    spec = r.spec
    mask = B.boundary_estimate(r)
    rng = np.random.default_rng(0)
    rows, cols = np.nonzero(r.outcome == CONVERGED)
    pick = rng.choice(rows.size, size=min(100, rows.size), replace=False)
    dx, dy = spec.pitch
    centers = spec.pixel_centers()
    probes, owners = [], []
    for i in pick:
        c = centers[rows[i], cols[i]]
        for d in (dx / 2, -dx / 2, 1j * dy / 2, -1j * dy / 2):
            probes.append(c + d)
            owners.append(i)
    res = D.iterate_batch(spec.g, spec.kind, np.array(probes), r.targets, spec.max_iter,
                          spec.conv_tol, spec.escape_radius)
    for k, i in enumerate(owners):
        same = res["outcome"][k] == CONVERGED and res["target"][k] == r.target[rows[i], cols[i]]
        assert same or mask[rows[i], cols[i]]


def test_newton_superattraction(zeta_raster):
    r = zeta_raster
    centers = r.spec.pixel_centers()
    bound = math.log2(math.log(1 / r.spec.conv_tol)) + 4
    for k, t in enumerate(r.spec.known_targets):
        near = (np.abs(centers - t) < 0.1) & (r.outcome == CONVERGED)
        if near.any():
            assert np.all(r.target[near] == k)
            assert r.iterations[near].max() <= bound


def test_render_is_deterministic(tmp_path, zeta_raster):
    again = B.render(zeta_raster.spec)
    threaded = B.render(zeta_raster.spec, threads=3, tile_rows=7)
    assert zeta_raster.identical(again) and zeta_raster.identical(threaded)
    p1, p2 = tmp_path / "a.ppm", tmp_path / "b.ppm"
    B.emit_image(zeta_raster, B.Palette(shade=True), p1)
    B.emit_image(again, B.Palette(shade=True), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_ppm_byte_layout(tmp_path):
    r = _synthetic([[0, 0]], [[0, 1]])
    pal = B.Palette(target_colors=((255, 0, 0), (0, 0, 255)))
    path = tmp_path / "two.ppm"
    B.emit_image(r, pal, path, sidecar=False)
    data = path.read_bytes()
    assert data == b"P6\n2 1\n255\n" + bytes.fromhex("FF0000 0000FF")


def test_grayscale_is_monotone():
    it = np.array([[0, 2, 5, 7, 10]])
    r = _synthetic(np.zeros((1, 5)), np.zeros((1, 5)), it, max_iter=10)
    img = B.Palette(grayscale=True).rgb(r)
    luma = img[0, :, 0].astype(int)
    assert np.all(np.diff(luma) < 0)
    assert np.all(img[..., 0] == img[..., 1])


def test_outcome_colours():
    r = _synthetic([[1, 2, 3]], [[-1, -1, -1]])
    img = B.Palette(escaped=(1, 2, 3), pole=(4, 5, 6), exhausted=(7, 8, 9)).rgb(r)
    assert img[0].tolist() == [[1, 2, 3], [4, 5, 6], [7, 8, 9]]


def test_png_and_sidecar(tmp_path, cosh_raster):
    pytest.importorskip("PIL")
    from PIL import Image

    png = tmp_path / "c.png"
    B.emit_image(cosh_raster, B.Palette(), png)
    img = np.asarray(Image.open(png).convert("RGB"))
    assert np.array_equal(img, B.Palette().rgb(cosh_raster))
    meta = json.loads((tmp_path / "c.png.json").read_text())
    spec = B.RenderSpec.from_dict(meta["spec"])
    assert spec == cosh_raster.spec
    assert len(meta["targets"]) == len(cosh_raster.targets)


def test_orbit_overlay(tmp_path, first_zeros):
    a = first_zeros[0].alpha
    spec = B.RenderSpec(F.zeta(), MapKind.nu(), (a.real - 0.5, a.real + 0.5, a.imag - 0.5, a.imag + 0.5),
                        20, 20, max_iter=20)
    r = B.render(spec)
    o = D.orbit(spec.g, spec.kind, a + 0.05, max_iter=2000)
    img = B.Palette(exhausted=(0, 0, 0)).rgb(r)
    n = B.overlay_points(img, spec, o.points, (255, 0, 255))
    assert n == len(o.points)   # the orbit stays near the indifferent zero
    assert (img == [255, 0, 255]).all(axis=2).sum() >= 2

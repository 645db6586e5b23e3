import cmath

import numpy as np
import pytest

from zetadyn import dynamics as D, family as F
from zetadyn.audit import CONSISTENT, FOUND, rh_audit
from zetadyn.dynamics import MapKind, fixed_point_report, index_quadrature
from zetadyn.errors import MapPole, NotAFixedPoint, QuadratureNonConvergent

NU = MapKind.nu()
NEWTON = MapKind.newton()
ALPHA1 = 0.5 + 14.134725141734693j
EXAMPLE = F.rational_from_roots([(-1, 1), (0.5, 2)], [(0, 3), (1, 1)])


def test_map_kind_validation():
    assert MapKind.newton(0.5 + 0.5j).kappa == 0.5 + 0.5j
    with pytest.raises(ValueError):
        MapKind.newton(2.5)
    with pytest.raises(ValueError):
        MapKind("halley")


def test_apply_map_fixes_zeros():
    assert abs(D.apply_map(F.zeta(), NU, ALPHA1) - ALPHA1) < 1e-12
    assert abs(D.apply_map(F.zeta(), NEWTON, ALPHA1) - ALPHA1) < 1e-12
    assert D.apply_map(F.zeta(), NU, 1) == 1


def test_nu_at_origin_is_not_fixed():
    # g/g' ~ z/m near a zero of order m at 0, so nu_g(0) = 0 - 1/m
    assert D.apply_map(F.polynomial([1, 0]), NU, 0) == -1
    assert D.apply_map(F.rational_from_roots([(0, 3)]), NU, 0) == pytest.approx(-1 / 3)
    with pytest.raises(NotAFixedPoint):
        fixed_point_report(F.polynomial([1, 0]), NU, 0)


def test_map_pole():
    g = F.polynomial([1, 0, -1])
    assert D.apply_map(g, NEWTON, 0) == D.POINT_AT_INFINITY
    with pytest.raises(MapPole):
        D.map_pole_check(g, NEWTON, 0)


def test_local_expansion_guard():
    g = F.polynomial([1, -3, 3, -1])   # (z - 1)^3 by coefficients
    z = np.array([1 + 1e-9])
    w = D.map_arrays(g, NEWTON, z, local_zeros=[(1.0, 3)])
    assert abs(w[0] - (1 + 1e-9 * (1 - 1 / 3))) < 1e-15


def test_zeta_pole_report():
    r = fixed_point_report(F.zeta(), NU, 1)
    assert r.source == "pole" and r.order == 1
    assert abs(r.multiplier - 2) < 1e-9 and abs(r.index_closed_form + 1) < 1e-9
    assert r.classification == "repelling"
    assert abs(r.index_quadrature + 1) < 1e-8


def test_trivial_zero_report():
    r = fixed_point_report(F.zeta(), NU, -2)
    assert abs(r.multiplier - 1.5) < 1e-12 and abs(r.index_closed_form + 2) < 1e-12
    assert r.classification == "repelling"


def test_rational_example():
    want = {-1: ("repelling", -1, 1), 0.5: ("attracting", 1, 2), 1: ("repelling", -1, 1)}
    for a, (cls, iota, m) in want.items():
        r = fixed_point_report(EXAMPLE, NU, a)
        assert r.classification == cls
        assert r.order == m
        assert abs(r.index_closed_form - iota) < 1e-9
        assert abs(r.index_quadrature - iota) < 1e-7


def test_order_by_winding():
    # coefficients only, no declared zeros: the order must be measured
    g = F.AnalyticFunction("polynomial", params=((1, -3, 0, 4),))   # (z - 2)^2 (z + 1)
    r = fixed_point_report(g, NU, 2)
    assert r.order == 2
    assert abs(r.index_closed_form - 4) < 1e-12
    assert abs(r.index_quadrature - 4) < 1e-7


def test_not_a_fixed_point():
    with pytest.raises(NotAFixedPoint):
        fixed_point_report(F.zeta(), NU, 0.5 + 14j)
    with pytest.raises(NotAFixedPoint):
        fixed_point_report(F.zeta(), NU, 0)


def test_newton_relaxed_multiplier():
    k = 0.7 + 0.3j
    kind = MapKind.newton(k)
    r = fixed_point_report(F.zeta(), kind, ALPHA1)
    assert abs(r.multiplier - (1 - k)) < 1e-15
    assert abs(r.index_quadrature - 1 / k) < 1e-7
    r = fixed_point_report(EXAMPLE, kind, 0.5)
    assert abs(r.multiplier - (1 - k / 2)) < 1e-15
    assert abs(r.index_quadrature - 2 / k) < 1e-7
    r = fixed_point_report(EXAMPLE, kind, 0)
    assert r.source == "pole" and abs(r.multiplier - (1 + k / 3)) < 1e-15
    assert abs(r.index_quadrature + 3 / k) < 1e-7


def test_quadrature_examples():
    f = D.as_callable(F.zeta(), NU)
    assert abs(index_quadrature(f, 1, 0.3) + 1) < 1e-8
    for K in (1, 2 + 1j, -3):
        assert abs(index_quadrature(lambda z: z - z ** 2 + K * z ** 3, 0) - K) < 1e-8
    assert abs(index_quadrature(lambda z: 0.5 * z, 0) - 2) < 1e-12


def test_quadrature_accepts_scalar_callables():
    assert abs(index_quadrature(lambda z: complex(0.25 * z), 0) - 4 / 3) < 1e-12


def test_prop_index_identity_random():
    rng = np.random.default_rng(5)
    for _ in range(50):
        lam = complex(rng.uniform(-2, 3), rng.uniform(-2, 2))
        if abs(lam - 1) < 0.05:
            continue
        a = complex(rng.normal(), rng.normal())

        def f(z, a=a, lam=lam):
            return a + lam * (z - a) + (z - a) ** 2

        other = a + (1 - lam)   # the second fixed point of this quadratic
        got = index_quadrature(f, a, other_fixed_points=[other])
        assert abs(got - 1 / (1 - lam)) < 1e-8


def test_node_doubling_is_stable():
    f = D.as_callable(F.zeta(), NU)
    a = index_quadrature(f, ALPHA1, 0.3, nodes=256, tol=1e-8)
    b = index_quadrature(f, ALPHA1, 0.3, nodes=512, tol=1e-8)
    assert abs(a - b) < 1e-8


def test_quadrature_nonconvergence_is_reported():
    def f(z):
        return z - z * (z - 0.3001)   # second fixed point just outside the circle

    with pytest.raises(QuadratureNonConvergent):
        index_quadrature(f, 0, radius=0.3, max_nodes=2048)


def _random_rational(rng):
    pts = []
    while len(pts) < rng.integers(3, 7):
        p = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        if abs(p) > 0.3 and all(abs(p - q) > 0.4 for q in pts):
            pts.append(p)
    nz = int(rng.integers(1, len(pts)))
    zeros = [(p, int(rng.integers(1, 4))) for p in pts[:nz]]
    poles = [(p, int(rng.integers(1, 4))) for p in pts[nz:]]
    return F.rational_from_roots(zeros, poles, complex(rng.normal(), rng.normal()))


def test_closed_form_vs_quadrature_random_rationals():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        g = _random_rational(rng)
        k = complex(rng.uniform(0.3, 1.6), rng.uniform(-0.5, 0.5))
        for kind in (NU, MapKind.newton(k)):
            for a, _ in g.declared_zeros + g.declared_poles:
                r = fixed_point_report(g, kind, a)
                worst = max(worst, abs(r.index_closed_form - r.index_quadrature))
                # closed forms agree with 1/(1 - lambda)
                assert abs(r.index_closed_form - 1 / (1 - r.multiplier)) < 1e-9
    assert worst < 1e-7


FAMILY_POINTS = [
    (F.zeta(), -4), (F.zeta(), ALPHA1), (F.eta(), ALPHA1), (F.xi(), ALPHA1),
    (F.chi(2, 0.8 + 3j), 0.8 + 3j), (F.chi(1, 1.2), ALPHA1), (F.cosh(), 1.5j * np.pi),
]


@pytest.mark.parametrize("g, a", FAMILY_POINTS, ids=lambda x: str(x))
@pytest.mark.parametrize("kind", [NU, MapKind.newton(0.8 - 0.2j)], ids=str)
def test_closed_form_vs_quadrature_family(g, a, kind):
    r = fixed_point_report(g, kind, a, polish=True)
    assert abs(r.index_closed_form - r.index_quadrature) < 1e-7


def test_reports_invariants():
    reports = [fixed_point_report(EXAMPLE, NU, a) for a in (-1, 0.5, 1)]
    reports += [fixed_point_report(F.zeta(), NU, a) for a in (1, -2, -6, ALPHA1)]
    reports += [fixed_point_report(F.chi(1, 1.2), NU, 1.2)]
    for r in reports:
        assert r.multiplier != 1
        # |lambda - 1| * m * |alpha| = 1 for nu-maps
        assert abs(abs(r.multiplier - 1) * r.order * abs(r.alpha) - 1) < 1e-9
        if abs(r.classification_margin) > r.margin_error:
            # Re iota > 1/2 exactly when |lambda| < 1
            assert np.sign(r.index_closed_form.real - 0.5) == -np.sign(r.classification_margin)


def test_json_shape():
    d = fixed_point_report(F.zeta(), NU, 1).to_json_dict()
    assert set(d) == {"alpha", "source", "order", "lambda", "iota_closed", "iota_quad", "class",
                      "margin"}
    assert d["lambda"] == [2.0, 0.0]
    assert fixed_point_report(F.zeta(), NU, 1, quadrature=False).to_json_dict()["iota_quad"] is None


def test_disk_witnesses():
    attracting = [(F.chi(1, 1.2), NU, 1.2), (EXAMPLE, NU, 0.5), (F.zeta(), NEWTON, ALPHA1),
                  (F.cosh(), MapKind.newton(0.6), 0.5j * np.pi)]
    for g, kind, a in attracting:
        r = fixed_point_report(g, kind, a)
        assert r.classification == "attracting"
        w = D.attracting_disk_witness(D.as_callable(g, kind), r.alpha)
        assert w is not None and w[1] > 0
    for g, kind, a in [(F.zeta(), NU, 1), (F.zeta(), NU, -2), (EXAMPLE, NU, -1)]:
        assert D.attracting_disk_witness(D.as_callable(g, kind), a) is None
        assert D.repelling_disk_witness(D.as_callable(g, kind), a) is not None


def test_orbit_examples():
    o = D.orbit(F.zeta(), NEWTON, ALPHA1 + 0.01, targets=[ALPHA1])
    assert o.outcome == "converged" and o.target == 0 and o.iterations <= 8
    o = D.orbit(F.zeta(), NEWTON, ALPHA1, targets=[ALPHA1])
    assert o.outcome == "converged" and o.iterations == 0
    o = D.orbit(F.zeta(), NU, -2 + 1e-3, max_iter=500, targets=[-2])
    assert not (o.outcome == "converged" and o.target == 0)
    assert abs(o.points[-1] + 2) > 1e-3
    with pytest.raises(ValueError):
        D.orbit(F.zeta(), NU, 2, max_iter=0)


def test_orbit_outcomes():
    g = F.polynomial([1, 0, -1])
    assert D.orbit(g, NEWTON, 0).outcome == "pole"
    assert D.orbit(g, NEWTON, 1e7).outcome == "escaped"
    o = D.orbit(g, NEWTON, 0.3 + 0.2j)
    assert o.outcome == "converged" and o.target is None and abs(o.limit - 1) < 1e-12
    # on the imaginary axis Newton for z^2 - 1 never settles
    assert D.orbit(g, NEWTON, 0.5j, max_iter=50).outcome in ("exhausted", "pole", "escaped")
    # a point near an indifferent zero of nu_zeta stays on a slow orbit
    assert D.orbit(F.zeta(), NU, ALPHA1 + 0.01, max_iter=100).outcome == "exhausted"


def test_batch_matches_single_orbits():
    g = F.cosh()
    seeds = np.array([0.3 + 1j, 2 - 4j, 0.1 + 7j, 5 + 5j])
    res = D.iterate_batch(g, NEWTON, seeds, targets=[0.5j * np.pi])
    for k, s in enumerate(seeds):
        o = D.orbit(g, NEWTON, s, targets=[0.5j * np.pi])
        assert D.OUTCOME_NAMES[res["outcome"][k]] == o.outcome
        assert res["iterations"][k] == o.iterations


# ------------------------------------------------------------------- audits

def test_audit_zeta_nu(first_zeros):
    v = rh_audit(first_zeros, F.zeta(), NU)
    assert v.summary == CONSISTENT
    assert v.in_strip == 20 and v.indifferent == 20
    assert v.max_re_iota_deviation < 1e-8 and v.max_modulus_gap < 1e-8
    sources = {r.source for r in v.reports}
    assert sources == {"zero", "pole"}
    assert any(abs(r.alpha + 2) < 1e-12 for r in v.reports)


def test_audit_xi_symmetry(first_zeros):
    v = rh_audit(first_zeros, F.xi(), NU)
    assert v.summary == CONSISTENT
    assert v.symmetry_residual < 1e-8
    assert v.in_strip == 40


def test_audit_chi_finds_attracting_point(first_zeros):
    v = rh_audit(first_zeros[:5], F.chi(1, 1.2), NU)
    assert v.summary == FOUND
    assert abs(v.attracting_at - 1.2) < 1e-12
    rep = [r for r in v.reports if abs(r.alpha - 1.2) < 1e-12][0]
    assert abs(rep.index_closed_form - 1.2) < 1e-12 and rep.index_closed_form.real > 0.5


def test_audit_newton_stripe(first_zeros):
    v = rh_audit(first_zeros[:10], F.zeta(), NEWTON, scan_size=(30, 60), scan_height=50)
    assert v.summary == CONSISTENT
    assert v.scan["targets_in_stripe"] == []
    assert all(r.classification == "attracting" for r in v.reports)


def test_audit_validation(first_zeros):
    with pytest.raises(ValueError):
        rh_audit([], F.zeta(), NU)
    with pytest.raises(ValueError):
        rh_audit(first_zeros, F.cosh(), NU)
    assert cmath.isclose(first_zeros[0].alpha, ALPHA1, abs_tol=1e-12)

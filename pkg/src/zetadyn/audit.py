"""Fixed-point audits of computed zeta zeros.

With the nu-map, every in-strip zero that is a simple zero on the critical
line is an indifferent fixed point (Re iota = 1/2); an attracting fixed
point would be a zero off the line or a multiple zero. With the Newton map,
the audit scans the stripe 1/2 < Re z < 1 for attracting fixed points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import FixedPointReport, MapKind, fixed_point_report
from .family import AnalyticFunction

CONSISTENT = "consistent-with-RH+simplicity"
FOUND = "attracting-fixed-point-found"
INCONCLUSIVE = "inconclusive"

AUDIT_FUNCTIONS = ("zeta", "xi", "eta", "chi")


@dataclass(frozen=True)
class RHVerdict:
    summary: str
    reports: tuple
    attracting_at: complex | None = None
    reason: str = ""
    in_strip: int = 0
    indifferent: int = 0
    # max |Re iota - 1/2| and max ||lambda| - 1| over in-strip reports
    max_re_iota_deviation: float = 0.0
    max_modulus_gap: float = 0.0
    # max |iota(alpha) + iota(1 - alpha) - m| for xi, else None
    symmetry_residual: float | None = None
    scan: dict | None = field(default=None, compare=False)

    def to_json_dict(self) -> dict:
        a = self.attracting_at
        return {
            "summary": self.summary,
            "attracting_at": None if a is None else [a.real, a.imag],
            "reason": self.reason,
            "in_strip": self.in_strip,
            "indifferent": self.indifferent,
            "max_re_iota_deviation": self.max_re_iota_deviation,
            "max_modulus_gap": self.max_modulus_gap,
            "symmetry_residual": self.symmetry_residual,
            "scan": self.scan,
            "reports": [r.to_json_dict() for r in self.reports],
        }


def _in_strip(a: complex) -> bool:
    return 0 < a.real < 1


def _extra_fixed_points(g: AnalyticFunction, height: float):
    """Declared poles and declared zeros 'in range' (|alpha| <= height, at least -2)."""
    out = [(complex(p), m) for p, m in g.declared_poles]
    for p, m in g.declared_zeros:
        p = complex(p)
        if abs(p) <= max(height, 2.0):
            out.append((p, m))
    return out


def rh_audit(zeros, g: AnalyticFunction, kind: MapKind, quadrature: bool = True,
             scan_size: tuple[int, int] = (100, 100), scan_height: float | None = None,
             threads: int = 1) -> RHVerdict:
    """Classify the fixed points at the given zeros and summarize.

    ``zeros`` is a list of ZeroRecord (critical-line ordinates). For the
    nu-map the declared poles and trivial zeros in range are audited as
    well; for the Newton map the stripe 1/2 < Re z < 1 up to
    ``scan_height`` is rendered and searched for attracting targets.
    """
    if not zeros:
        raise ValueError("rh_audit needs at least one zero")
    if g.name not in AUDIT_FUNCTIONS:
        raise ValueError(f"rh_audit supports {AUDIT_FUNCTIONS}, not {g.name!r}")
    alphas = [complex(0.5, float(r.gamma)) for r in zeros]
    height = max(a.imag for a in alphas)
    if kind.kind == "nu":
        return _audit_nu(g, kind, alphas, height, quadrature)
    return _audit_newton(g, kind, alphas, height, quadrature, scan_size, scan_height, threads)


def _audit_nu(g, kind, alphas, height, quadrature):
    extras = _extra_fixed_points(g, height)
    known = alphas + [p for p, _ in extras]
    reports: list[FixedPointReport] = []
    for a in alphas:
        reports.append(fixed_point_report(g, kind, a, quadrature=quadrature, polish=True,
                                          other_fixed_points=known))
    sym = None
    if g.name == "xi":
        sym = 0.0
        for r in list(reports):
            partner = fixed_point_report(g, kind, 1 - r.alpha, quadrature=quadrature,
                                         polish=True, other_fixed_points=known)
            reports.append(partner)
            target = r.order
            sym = max(sym, abs(r.index_closed_form + partner.index_closed_form - target))
            if quadrature:
                sym = max(sym, abs(r.index_quadrature + partner.index_quadrature - target))
    for p, m in extras:
        if any(abs(p - r.alpha) < 1e-9 for r in reports):
            continue
        reports.append(fixed_point_report(g, kind, p, order_hint=m, quadrature=quadrature,
                                          other_fixed_points=known))
    strip = [r for r in reports if _in_strip(r.alpha)]
    dev = max((abs(r.re_index - r.order / 2) for r in strip), default=0.0)
    gap = max((abs(r.classification_margin) for r in strip), default=0.0)
    n_ind = sum(r.classification == "indifferent" for r in strip)
    common = dict(reports=tuple(reports), in_strip=len(strip), indifferent=n_ind,
                  max_re_iota_deviation=dev, max_modulus_gap=gap, symmetry_residual=sym)
    attracting = [r for r in reports if r.classification == "attracting"]
    if attracting:
        a = attracting[0].alpha
        where = "inside" if _in_strip(a) else "outside"
        return RHVerdict(FOUND, attracting_at=a,
                         reason=f"attracting fixed point at {a} ({where} the critical strip)",
                         **common)
    if n_ind == len(strip) and (sym is None or sym < 1e-8):
        return RHVerdict(CONSISTENT, reason=f"all {len(strip)} in-strip fixed points indifferent",
                         **common)
    bad = [r for r in strip if r.classification != "indifferent"]
    if bad:
        reason = f"in-strip fixed point at {bad[0].alpha} is {bad[0].classification}"
    else:
        reason = f"symmetry residual {sym:.3g} exceeds 1e-8"
    return RHVerdict(INCONCLUSIVE, reason=reason, **common)


def _audit_newton(g, kind, alphas, height, quadrature, scan_size, scan_height, threads):
    from .basin import RenderSpec, render

    top = float(scan_height) if scan_height is not None else math.ceil(height) + 1.0
    extras = _extra_fixed_points(g, top)
    known = alphas + [p for p, _ in extras if not g.pole_order(p)]
    reports = tuple(fixed_point_report(g, kind, a, quadrature=quadrature, polish=True,
                                       other_fixed_points=known) for a in alphas)
    width, h = scan_size
    spec = RenderSpec(g, kind, (0.5, 1.0, 0.0, top), width, h, known_targets=tuple(known))
    raster = render(spec, threads=threads)
    conv = raster.outcome == 0
    hits = np.unique(raster.target[conv])
    inside = [raster.targets[t] for t in hits if t >= 0 and _stripe(raster.targets[t])]
    scan = {"region": [0.5, 1.0, 0.0, top], "size": [width, h],
            "converged": int(conv.sum()), "targets_hit": len(hits),
            "targets_in_stripe": [[t.real, t.imag] for t in inside]}
    common = dict(reports=reports, in_strip=len(reports), indifferent=0, scan=scan)
    if inside:
        return RHVerdict(FOUND, attracting_at=inside[0],
                         reason=f"Newton orbits converge to {inside[0]} inside the stripe", **common)
    return RHVerdict(CONSISTENT, reason="no attracting fixed point of the Newton map located "
                     "in 1/2 < Re z < 1", **common)


def _stripe(t: complex, tol: float = 1e-6) -> bool:
    return 0.5 + tol < t.real < 1.0


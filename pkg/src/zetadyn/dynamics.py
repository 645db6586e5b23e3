"""Fixed points of the nu-map and relaxed Newton maps of an analytic function.

For g meromorphic,

    nu_g(z)   = z - g(z) / (z g'(z))
    N_g,k(z)  = z - k g(z) / g'(z)

Both fix exactly the zeros and poles of g (z = 0 excluded for nu). At a zero
or pole alpha of order m the multiplier and holomorphic index have closed
forms; the index is also computed independently as the contour integral
(1/2 pi i) \\oint dz / (z - f(z)) by the trapezoidal rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (MapPole, NotAFixedPoint, OrderUndetermined, QuadratureNonConvergent)
from .family import AnalyticFunction
from .special import EPS, T_MAX, as_point

POINT_AT_INFINITY = complex(math.inf, 0.0)

# orbit outcome codes, shared with the renderer
CONVERGED, ESCAPED, POLE, EXHAUSTED = 0, 1, 2, 3
OUTCOME_NAMES = ("converged", "escaped", "pole", "exhausted")

# below this |g| the local expansion g/g' ~ (z - alpha)/m is used
LOCAL_GUARD = 1e-12


@dataclass(frozen=True)
class MapKind:
    """``nu`` or ``newton`` with relaxation constant kappa, |kappa - 1| < 1."""

    kind: str = "nu"
    kappa: complex = 1.0

    def __post_init__(self):
        if self.kind not in ("nu", "newton"):
            raise ValueError(f"unknown map kind {self.kind!r}")
        if self.kind == "newton" and not abs(complex(self.kappa) - 1) < 1:
            raise ValueError("relaxed Newton maps need |kappa - 1| < 1")

    @classmethod
    def nu(cls) -> "MapKind":
        return cls("nu")

    @classmethod
    def newton(cls, kappa=1.0) -> "MapKind":
        return cls("newton", complex(kappa))

    def to_dict(self) -> dict:
        if self.kind == "nu":
            return {"kind": "nu"}
        k = complex(self.kappa)
        return {"kind": "newton", "kappa": [k.real, k.imag]}

    def __str__(self) -> str:
        if self.kind == "nu":
            return "nu"
        return "newton" if self.kappa == 1 else f"newton(kappa={complex(self.kappa)})"


def in_domain(g: AnalyticFunction, z):
    """Points where g can be evaluated reliably in binary64."""
    z = np.asarray(z, dtype=complex)
    finite = np.isfinite(z)
    if g.name in ("zeta", "eta", "chi", "xi"):
        ok = (np.abs(z.imag) <= T_MAX) & (z.real > -150) & (z.real < 300)
    elif g.name == "cosh":
        ok = np.abs(z.real) < 700
    else:
        ok = np.ones(z.shape, bool)
    return finite & ok


def map_arrays(g: AnalyticFunction, kind: MapKind, z, target_abs_err: float = 1e-12,
               local_zeros=()):
    """Vectorized map; returns inf where the map has a pole.

    ``local_zeros`` is a sequence of (alpha, m): within 1e-8 of alpha, and
    when |g| < LOCAL_GUARD, g/g' is replaced by (z - alpha)/m.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    q = g.ratio(z, target_abs_err)
    if local_zeros:
        v, _, _ = g.values(z, target_abs_err)
        for alpha, m in local_zeros:
            close = (np.abs(z - alpha) < 1e-8) & (np.abs(v) < LOCAL_GUARD)
            q = np.where(close, (z - alpha) / m, q)
    with np.errstate(all="ignore"):
        if kind.kind == "nu":
            w = z - q / z
            w = np.where((z == 0) & (q != 0), np.inf, w)
            at0 = (z == 0) & (q == 0)
            if at0.any():
                # g/g' ~ z/m near a zero of order m at 0, so nu_g(0) = -1/m
                m = g.zero_order(0) or winding_order(g, 0.0)
                w = np.where(at0, -1.0 / m, w)
        else:
            w = z - complex(kind.kappa) * q
    w = np.where(np.isfinite(w), w, np.inf)
    return w


def apply_map(g: AnalyticFunction, kind: MapKind, z, target_abs_err: float = 1e-12,
              local_zeros=()) -> complex:
    """One application of the map; POINT_AT_INFINITY at a pole of the map."""
    z = as_point(z)
    if g.pole_order(z):
        # poles of g are fixed points of both maps
        return z
    w = complex(map_arrays(g, kind, np.array([z]), target_abs_err, local_zeros)[0])
    if not math.isfinite(abs(w)):
        return POINT_AT_INFINITY
    return w


def as_callable(g: AnalyticFunction, kind: MapKind, target_abs_err: float = 1e-12):
    """The map as a vectorized callable, for quadrature and witnesses."""
    def f(z):
        return map_arrays(g, kind, z, target_abs_err)
    return f


# ------------------------------------------------------------ closed forms

def closed_form(kind: MapKind, alpha: complex, order: int, source: str):
    """(multiplier, index) at a zero/pole of the given order."""
    m = order
    if kind.kind == "nu":
        if alpha == 0:
            raise NotAFixedPoint("0 is never a fixed point of the nu-map")
        if source == "zero":
            return 1 - 1 / (m * alpha), m * alpha
        return 1 + 1 / (m * alpha), -m * alpha
    k = complex(kind.kappa)
    if source == "zero":
        return 1 - k / m, m / k
    return 1 + k / m, -m / k


def index_from_multiplier(lam: complex) -> complex:
    """1 / (1 - lambda), valid whenever lambda != 1."""
    if lam == 1:
        raise ValueError("multiplier 1 has no index formula")
    return 1 / (1 - lam)


# -------------------------------------------------------------- quadrature

def _call_vectorized(f, z):
    try:
        w = np.asarray(f(z), dtype=complex)
        if w.shape == z.shape:
            return w
    except TypeError:
        pass
    return np.array([complex(f(complex(x))) for x in z])


def _trapezoid_index(f, alpha, radius, nodes):
    phi = 2 * np.pi * np.arange(nodes) / nodes
    dz = radius * np.exp(1j * phi)
    z = alpha + dz
    w = _call_vectorized(f, z)
    with np.errstate(all="ignore"):
        integrand = dz / (z - w)
    # the map may have poles on the circle; 1/(z - f) vanishes there
    integrand = np.where(np.isfinite(w), integrand, 0.0)
    return complex(integrand.mean())


def index_quadrature(f, alpha, radius: float | None = None, nodes: int = 256,
                     other_fixed_points=(), tol: float = 1e-8, max_nodes: int = 8192) -> complex:
    """Holomorphic index of ``f`` at ``alpha`` by the trapezoidal rule.

    The circle radius defaults to 0.3 and is shrunk until every other known
    fixed point is at least three radii away. The node count doubles until
    two successive estimates agree to ``tol``.
    """
    alpha = as_point(alpha)
    r = 0.3 if radius is None else float(radius)
    # entries within 1e-9 are alpha itself, possibly before polishing
    others = [complex(p) for p in other_fixed_points
              if abs(complex(p) - alpha) > 1e-9 * max(1.0, abs(alpha))]
    if others:
        nearest = min(abs(p - alpha) for p in others)
        while nearest < 3 * r:
            r /= 2
    n = nodes
    prev = _trapezoid_index(f, alpha, r, n)
    while n < max_nodes:
        n *= 2
        cur = _trapezoid_index(f, alpha, r, n)
        change = abs(cur - prev)
        if change <= tol:
            return cur
        prev = cur
    raise QuadratureNonConvergent(
        f"index at {alpha} changed by {change:.3g} when doubling to {n} nodes")


def winding_order(g: AnalyticFunction, alpha, radius: float = 1e-3, nodes: int = 64) -> int:
    """Order of g at alpha (zero > 0, pole < 0) from (1/2 pi i) \\oint g'/g."""
    alpha = as_point(alpha)
    phi = 2 * np.pi * np.arange(nodes) / nodes
    dz = radius * np.exp(1j * phi)
    L = g.log_derivative(alpha + dz, 1e-13)
    w = complex((dz * L).mean())
    m = round(w.real)
    if abs(w - m) > 0.05 or not np.all(np.isfinite(L)):
        raise OrderUndetermined(f"winding {w:.4f} at {alpha} is not an integer")
    return int(m)


# ------------------------------------------------------------ fixed points

@dataclass(frozen=True)
class FixedPointReport:
    alpha: complex
    source: str
    order: int
    multiplier: complex
    index_closed_form: complex
    index_quadrature: complex | None
    classification: str
    # |lambda| - 1 and the numerical error bound on it
    classification_margin: float
    margin_error: float = 0.0
    map_kind: str = "nu"

    @property
    def re_index(self) -> float:
        return self.index_closed_form.real

    def to_json_dict(self) -> dict:
        def enc(c):
            return None if c is None else [complex(c).real, complex(c).imag]

        return {
            "alpha": enc(self.alpha),
            "source": self.source,
            "order": self.order,
            "lambda": enc(self.multiplier),
            "iota_closed": enc(self.index_closed_form),
            "iota_quad": enc(self.index_quadrature),
            "class": self.classification,
            "margin": self.classification_margin,
        }


def classify(lam: complex, error: float = 0.0) -> tuple[str, float]:
    """attracting / indifferent / repelling by |lambda| vs 1, with a tie band."""
    margin = abs(lam) - 1.0
    tie = max(error, 4 * EPS * max(1.0, abs(lam)))
    if abs(margin) <= tie:
        return "indifferent", margin
    return ("attracting" if margin < 0 else "repelling"), margin


def polish_zero(g: AnalyticFunction, alpha: complex, steps: int = 4) -> complex:
    """A few unconstrained Newton steps in the complex plane (simple zeros)."""
    z = alpha
    for _ in range(steps):
        v, d, _ = g.values(np.array([z]), 1e-14)
        v, d = complex(v[0]), complex(d[0])
        if d == 0 or v == 0:
            break
        step = v / d
        z -= step
        if abs(step) < 4 * EPS * abs(z):
            break
    return z


def fixed_point_report(g: AnalyticFunction, kind: MapKind, alpha, order_hint: int | None = None,
                       quadrature: bool = True, other_fixed_points=(), radius: float | None = None,
                       nodes: int = 256, location_error: float | None = None,
                       polish: bool = False, zero_tol: float = 1e-8) -> FixedPointReport:
    """Multiplier, index and classification of a fixed point of nu_g or N_g.

    ``alpha`` must be a zero of g (Newton step |g/g'| <= zero_tol) or a
    declared pole. The order comes from ``order_hint``, then declared metadata, then
    the winding number of g on a small circle.
    """
    alpha = as_point(alpha)
    if kind.kind == "nu" and alpha == 0:
        raise NotAFixedPoint("0 is never a fixed point of the nu-map")
    pole_m = g.pole_order(alpha)
    if pole_m:
        source = "pole"
        m = order_hint or pole_m
        loc_err = 0.0 if location_error is None else location_error
    else:
        if polish and order_hint in (None, 1):
            alpha = polish_zero(g, alpha)
        v, d, b = g.values(np.array([alpha]), 1e-13)
        v, d = complex(v[0]), complex(d[0])
        # a relative test: |g| alone means little for xi, which is tiny everywhere high up
        step = 0.0 if v == 0 else (abs(v / d) if d != 0 else math.inf)
        if not step <= zero_tol:
            raise NotAFixedPoint(f"{alpha} is not a zero or declared pole of {g} "
                                 f"(Newton step {step:.3g})")
        source = "zero"
        if order_hint is not None:
            m = int(order_hint)
        elif g.zero_order(alpha):
            m = g.zero_order(alpha)
        else:
            if location_error is None and d != 0:
                location_error = abs(v / d)
            r = max(1e-3, 10 * (location_error or 0.0))
            m = winding_order(g, alpha, r)
            if m <= 0:
                raise OrderUndetermined(f"winding {m} at {alpha}: not a zero")
        if location_error is not None:
            loc_err = location_error
        elif d != 0 and m == 1:
            loc_err = abs(v / d) + float(b[0]) / abs(d)
        else:
            loc_err = 0.0
        loc_err = max(loc_err, 2 * EPS * abs(alpha))
    lam, iota = closed_form(kind, alpha, m, source)
    if kind.kind == "nu":
        lam_err = loc_err / (m * abs(alpha) ** 2)
    else:
        lam_err = 0.0
    cls, margin = classify(lam, lam_err)
    iq = None
    if quadrature:
        others = [p for p, _ in g.declared_zeros] + [p for p, _ in g.declared_poles]
        others += list(other_fixed_points)
        iq = index_quadrature(as_callable(g, kind), alpha, radius, nodes, others)
    return FixedPointReport(alpha, source, m, lam, iota, iq, cls, margin,
                            lam_err + 4 * EPS, kind.kind)


def attracting_disk_witness(f, alpha, radii=(0.1, 0.03, 1e-2, 3e-3, 1e-3, 1e-4),
                            samples: int = 360):
    """A round disk D about alpha with closure(f(D)) inside D, if one is found.

    Checks max |f(z) - alpha| < r (1 - delta) on ``samples`` boundary points;
    returns (r, delta) or None.
    """
    alpha = as_point(alpha)
    phi = 2 * np.pi * np.arange(samples) / samples
    for r in radii:
        z = alpha + r * np.exp(1j * phi)
        w = _call_vectorized(f, z)
        if not np.all(np.isfinite(w)):
            continue
        rho = np.max(np.abs(w - alpha)) / r
        if rho < 1:
            return r, 1 - rho
    return None


def repelling_disk_witness(f, alpha, radii=(1e-2, 3e-3, 1e-3, 1e-4), samples: int = 360):
    """A disk whose boundary image winds once around it at larger distance.

    Checks min |f(z) - alpha| > r (1 + delta) and winding number 1 of
    f(z) - alpha along the circle; returns (r, delta) or None.
    """
    alpha = as_point(alpha)
    phi = 2 * np.pi * np.arange(samples + 1) / samples
    for r in radii:
        z = alpha + r * np.exp(1j * phi)
        w = _call_vectorized(f, z) - alpha
        if not np.all(np.isfinite(w)):
            continue
        rho = np.min(np.abs(w)) / r
        turns = np.sum(np.angle(w[1:] / w[:-1])) / (2 * np.pi)
        if rho > 1 and round(turns) == 1:
            return r, rho - 1
    return None


# ------------------------------------------------------------------ orbits

@dataclass(frozen=True)
class OrbitResult:
    outcome: str
    target: int | None
    iterations: int
    limit: complex | None
    points: tuple = field(default=(), repr=False)


def iterate_batch(g: AnalyticFunction, kind: MapKind, z0, targets=(), max_iter: int = 200,
                  conv_tol: float = 1e-8, escape_radius: float = 1e6, record: bool = False,
                  target_abs_err: float | None = None):
    """Iterate many seeds at once.

    Convergence needs two successive iterates whose step is below
    conv_tol/10; the target is the registered fixed point within conv_tol
    of the first of them, or -1 if none is (an unregistered limit).
    Returns dict of arrays: outcome, target, iterations, final (last
    iterate) and, with ``record``, the list of orbit arrays.
    """
    z = np.atleast_1d(np.asarray(z0, dtype=complex)).ravel().copy()
    n = z.size
    tgt = np.asarray(list(targets), dtype=complex)
    if target_abs_err is None:
        target_abs_err = float(np.clip(conv_tol * 1e-3, 1e-13, 1e-6))
    outcome = np.full(n, EXHAUSTED, dtype=np.int8)
    target = np.full(n, -1, dtype=np.int32)
    iters = np.full(n, max_iter, dtype=np.int32)
    prev_hit = np.zeros(n, bool)
    prev_target = np.full(n, -1, dtype=np.int32)
    active = np.ones(n, bool)
    history = [z.copy()] if record else None
    for k in range(max_iter + 1):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        zk = z[idx]
        ok = in_domain(g, zk)
        esc = ~ok | (np.abs(zk) > escape_radius)
        w = np.full(zk.shape, np.inf + 0j)
        if np.any(~esc):
            w[~esc] = map_arrays(g, kind, zk[~esc], target_abs_err)
        # declared poles of g are fixed by both maps
        for p, _ in g.declared_poles:
            w = np.where(zk == p, zk, w)
        pole = ~esc & ~np.isfinite(w)
        step = np.abs(w - zk)
        hit = ~esc & ~pole & (step < conv_tol / 10)
        tid = np.full(idx.size, -1, dtype=np.int32)
        if tgt.size:
            d = np.abs(zk[:, None] - tgt[None, :])
            near = d.min(axis=1) < conv_tol
            tid = np.where(near, d.argmin(axis=1), -1).astype(np.int32)
        conv = hit & prev_hit[idx]
        done_conv = idx[conv]
        outcome[done_conv] = CONVERGED
        target[done_conv] = prev_target[idx][conv]
        iters[done_conv] = k - 1
        outcome[idx[esc]] = ESCAPED
        iters[idx[esc]] = k
        outcome[idx[pole]] = POLE
        iters[idx[pole]] = k
        finished = conv | esc | pole
        prev_hit[idx] = hit
        prev_target[idx] = tid
        if k == max_iter:
            break
        move = ~finished
        z[idx[move]] = w[move]
        active[idx[finished]] = False
        if record:
            history.append(z.copy())
    return {"outcome": outcome, "target": target, "iterations": iters, "final": z,
            "history": history}


def orbit(g: AnalyticFunction, kind: MapKind, z0, max_iter: int = 200,
          escape_radius: float = 1e6, targets=(), conv_tol: float = 1e-8) -> OrbitResult:
    """Orbit of one seed, with the outcome of the iteration."""
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    z0 = as_point(z0)
    res = iterate_batch(g, kind, [z0], targets, max_iter, conv_tol, escape_radius, record=True)
    oc = int(res["outcome"][0])
    it = int(res["iterations"][0])
    pts = tuple(complex(h[0]) for h in res["history"][: it + 1])
    tid = int(res["target"][0]) if oc == CONVERGED else -1
    tid = tid if tid >= 0 else None
    limit = complex(res["final"][0]) if oc == CONVERGED else None
    return OrbitResult(OUTCOME_NAMES[oc], tid, it, limit, pts)


def map_pole_check(g: AnalyticFunction, kind: MapKind, z) -> None:
    """Raise MapPole if the map sends z to infinity."""
    if apply_map(g, kind, z) == POINT_AT_INFINITY:
        raise MapPole(f"{kind} map of {g} has a pole at {complex(z)}")

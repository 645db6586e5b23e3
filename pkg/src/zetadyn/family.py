"""Registry of analytic functions the dynamics code can be built from.

Each :class:`AnalyticFunction` knows how to evaluate itself and its
derivative on numpy arrays, and carries the zeros and poles that are known
in closed form (orders included).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import special
from .errors import OverflowDomain, PoleHit
from .special import DEFAULT_ABS_ERR, EPS, LOG_PI, EvalResult, as_point

FAMILY_NAMES = ("zeta", "xi", "eta", "chi", "cosh", "rational", "polynomial")

# how many trivial zeros / cosh zeros are listed as declared metadata
DECLARED_DEPTH = 30
# |Im z| beyond which xi is only evaluated through logarithms
XI_DIRECT_SAFE = 30.0


def _cluster_roots(roots, tol=1e-4):
    """Group numerically computed roots into (location, multiplicity).

    A root of multiplicity m is only found to about eps**(1/m), hence the
    loose tolerance.
    """
    out = []
    for r in sorted(roots, key=lambda c: (c.real, c.imag)):
        for i, (loc, m) in enumerate(out):
            if abs(loc - r) < tol * max(1.0, abs(loc)):
                out[i] = ((loc * m + r) / (m + 1), m + 1)
                break
        else:
            out.append((complex(r), 1))
    return tuple(out)


@dataclass(frozen=True)
class AnalyticFunction:
    """A named meromorphic function with declared zeros and poles.

    ``params`` holds the family parameters: ``(m, a)`` for chi, coefficient
    tuples (highest degree first) for polynomial/rational, and
    ``(zeros, poles, scale)`` for a factored rational.
    """

    name: str
    params: tuple = ()
    declared_poles: tuple = ()
    declared_zeros: tuple = ()
    factored: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    # -- evaluation ------------------------------------------------------
    def values(self, z, target_abs_err: float = DEFAULT_ABS_ERR):
        """Arrays (g, g', abs_error_bound) at the points ``z``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return _EVALUATORS[self.name](self, z, target_abs_err)

    def ratio(self, z, target_abs_err: float = DEFAULT_ABS_ERR):
        """g/g' on an array, 0 at exact zeros and inf at critical points."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        with np.errstate(all="ignore"):
            if self.factored:
                L = self._factored_logderiv(z)
                q = np.where(np.isinf(L), 0.0, 1.0 / L)
                return q
            v, d, _ = self.values(z, target_abs_err)
            q = v / d
            q = np.where(v == 0, 0.0, q)
            q = np.where((d == 0) & (v != 0), np.inf, q)
        return q

    def log_derivative(self, z, target_abs_err: float = DEFAULT_ABS_ERR):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if self.factored:
            return self._factored_logderiv(z)
        v, d, _ = self.values(z, target_abs_err)
        with np.errstate(all="ignore"):
            return d / v

    def _factored_logderiv(self, z):
        zeros, poles, _ = self.params
        L = np.zeros_like(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            for r, m in zeros:
                L = L + m / (z - r)
            for r, m in poles:
                L = L - m / (z - r)
        return L

    # -- metadata --------------------------------------------------------
    @property
    def chi_condition(self) -> bool | None:
        """Re(m a) > 1/2 for chi; None for other members."""
        if self.name != "chi":
            return None
        m, a = self.params
        return (m * complex(a)).real > 0.5

    def is_entire(self) -> bool:
        return not self.declared_poles and self.name != "rational"

    def pole_order(self, z, tol: float = 1e-12) -> int:
        for loc, m in self.declared_poles:
            if abs(complex(loc) - complex(z)) <= tol:
                return m
        return 0

    def zero_order(self, z, tol: float = 1e-9) -> int:
        for loc, m in self.declared_zeros:
            if abs(complex(loc) - complex(z)) <= tol:
                return m
        return 0

    def to_dict(self) -> dict:
        def enc(c):
            c = complex(c)
            return [c.real, c.imag]

        d = {"name": self.name}
        if self.name == "chi":
            m, a = self.params
            d.update(m=m, a=enc(a))
        elif self.factored:
            zeros, poles, scale = self.params
            d.update(zeros=[[enc(r), m] for r, m in zeros],
                     poles=[[enc(r), m] for r, m in poles], scale=enc(scale))
        elif self.name == "polynomial":
            d.update(coeffs=[enc(c) for c in self.params[0]])
        elif self.name == "rational":
            d.update(num=[enc(c) for c in self.params[0]], den=[enc(c) for c in self.params[1]])
        return d

    def __str__(self) -> str:
        if self.name == "chi":
            m, a = self.params
            return f"chi(m={m}, a={complex(a)})"
        return self.name


# ---------------------------------------------------------------- builders

def zeta() -> AnalyticFunction:
    trivial = tuple((complex(-2 * k), 1) for k in range(1, DECLARED_DEPTH + 1))
    return AnalyticFunction("zeta", declared_poles=((1 + 0j, 1),), declared_zeros=trivial)


def eta() -> AnalyticFunction:
    trivial = tuple((complex(-2 * k), 1) for k in range(1, DECLARED_DEPTH + 1))
    return AnalyticFunction("eta", declared_zeros=trivial)


def xi() -> AnalyticFunction:
    return AnalyticFunction("xi")


def chi(m: int, a) -> AnalyticFunction:
    """(z - a)^m (z - 1) zeta(z)."""
    if int(m) != m or m < 1:
        raise ValueError("chi requires an integer m >= 1")
    a = as_point(a)
    trivial = tuple((complex(-2 * k), 1) for k in range(1, DECLARED_DEPTH + 1))
    f = AnalyticFunction("chi", params=(int(m), a),
                         declared_zeros=((a, int(m)),) + trivial)
    f.meta["re_ma_gt_half"] = (m * a).real > 0.5
    return f


def cosh() -> AnalyticFunction:
    zeros = tuple((complex(0, math.pi * (k + 0.5)), 1)
                  for k in range(-DECLARED_DEPTH, DECLARED_DEPTH))
    return AnalyticFunction("cosh", declared_zeros=zeros)


def polynomial(coeffs) -> AnalyticFunction:
    """Polynomial from coefficients, highest degree first."""
    c = tuple(complex(x) for x in coeffs)
    if not c or all(x == 0 for x in c):
        raise ValueError("polynomial must be non-zero")
    roots = np.roots(np.array(c)) if len(c) > 1 else []
    return AnalyticFunction("polynomial", params=(c,), declared_zeros=_cluster_roots(roots))


def rational(num, den) -> AnalyticFunction:
    """P/Q from coefficient lists (highest degree first).

    Zeros and poles are declared from numerically computed roots; common
    roots are not cancelled. Prefer :func:`rational_from_roots` when the
    factorization is known exactly.
    """
    p = tuple(complex(x) for x in num)
    q = tuple(complex(x) for x in den)
    if all(x == 0 for x in q):
        raise ValueError("denominator must be non-zero")
    zr = _cluster_roots(np.roots(np.array(p))) if len(p) > 1 else ()
    pr = _cluster_roots(np.roots(np.array(q))) if len(q) > 1 else ()
    return AnalyticFunction("rational", params=(p, q), declared_zeros=zr, declared_poles=pr)


def rational_from_roots(zeros, poles=(), scale=1.0) -> AnalyticFunction:
    """scale * prod (z - r)^m / prod (z - p)^k from (location, order) pairs.

    Evaluation uses the factored form, so g/g' stays exact near multiple
    zeros.
    """
    zs = tuple((as_point(r), int(m)) for r, m in zeros)
    ps = tuple((as_point(r), int(m)) for r, m in poles)
    name = "rational" if ps else "polynomial"
    return AnalyticFunction(name, params=(zs, ps, as_point(scale)), declared_zeros=zs,
                            declared_poles=ps, factored=True)


def from_dict(d: dict) -> AnalyticFunction:
    name = d["name"]

    def dec(v):
        return complex(v[0], v[1])

    if name == "zeta":
        return zeta()
    if name == "eta":
        return eta()
    if name == "xi":
        return xi()
    if name == "cosh":
        return cosh()
    if name == "chi":
        return chi(d["m"], dec(d["a"]))
    if "zeros" in d:
        return rational_from_roots([(dec(r), m) for r, m in d["zeros"]],
                                   [(dec(r), m) for r, m in d.get("poles", [])],
                                   dec(d.get("scale", [1, 0])))
    if name == "polynomial":
        return polynomial([dec(c) for c in d["coeffs"]])
    if name == "rational":
        return rational([dec(c) for c in d["num"]], [dec(c) for c in d["den"]])
    raise ValueError(f"unknown function {name!r}")


def by_name(name: str, m: int = 1, a=1.2) -> AnalyticFunction:
    """Registry lookup used by the CLI."""
    builders = {"zeta": zeta, "xi": xi, "eta": eta, "cosh": cosh}
    if name == "chi":
        return chi(m, a)
    if name not in builders:
        raise ValueError(f"unknown function {name!r}; expected one of {sorted(builders) + ['chi']}")
    return builders[name]()


# -------------------------------------------------------------- evaluators

def _eval_zeta(f, z, tol):
    return special.zeta_arrays(z, tol)


def _eval_eta(f, z, tol):
    return special.eta_arrays(z, tol)


def _xi_prefactor(z, log_space=True):
    """B(z) = -pi^{-z/2} Gamma(1 + z/2) and B'(z), so that xi = B * eta."""
    w = 1.0 + 0.5 * z
    if log_space:
        B = -np.exp(-0.5 * z * LOG_PI + special.loggamma(w))
    else:
        B = -np.power(math.pi, -0.5 * z) * special.gamma(w)
    dB = B * (-0.5 * LOG_PI + 0.5 * special.digamma(w))
    return B, dB


def _eval_xi(f, z, tol, log_space=True):
    # xi(z) = 1/2 z (z-1)... rewritten as -pi^{-z/2} Gamma(1+z/2) (z-1) zeta(z),
    # which has no removable singularities; Re z < 0 uses xi(z) = xi(1-z)
    left = z.real < 0
    w = np.where(left, 1.0 - z, z)
    with np.errstate(all="ignore"):
        e, de, be = special.eta_arrays(w, tol)
        B, dB = _xi_prefactor(w, log_space)
        val = B * e
        der = dB * e + B * de
    der = np.where(left, -der, der)
    bound = np.abs(B) * be + 16 * EPS * np.abs(val)
    return val, der, bound


def _eval_chi(f, z, tol):
    m, a = f.params
    e, de, be = special.eta_arrays(z, tol)
    with np.errstate(all="ignore"):
        za = z - a
        pw = za ** m
        val = pw * e
        der = m * za ** (m - 1) * e + pw * de
    return val, der, np.abs(pw) * be + 4 * EPS * np.abs(val)


def _eval_cosh(f, z, tol):
    val = np.cosh(z)
    der = np.sinh(z)
    return val, der, 4 * EPS * np.maximum(np.abs(val), 1.0) * (1 + np.abs(z))


def _eval_poly_coeffs(c, z):
    c = np.array(c)
    v = np.polyval(c, z)
    d = np.polyval(np.polyder(c), z) if len(c) > 1 else np.zeros_like(z)
    return v, d


def _eval_factored(f, z):
    zeros, poles, scale = f.params
    num = np.full(z.shape, scale, dtype=complex)
    den = np.ones_like(z)
    for r, m in zeros:
        num = num * (z - r) ** m
    for r, m in poles:
        den = den * (z - r) ** m
    with np.errstate(all="ignore"):
        val = num / den
        L = f._factored_logderiv(z)
        der = val * L
        # exact zeros: derivative is nonzero only for simple zeros
        at_zero = val == 0
        if np.any(at_zero):
            for r, m in zeros:
                hit = at_zero & (z == r)
                if m == 1 and np.any(hit):
                    rest = np.full(z.shape, scale, dtype=complex)
                    for r2, m2 in zeros:
                        if r2 != r:
                            rest = rest * (z - r2) ** m2
                    der = np.where(hit, rest / den, der)
                elif np.any(hit):
                    der = np.where(hit, 0.0, der)
    return val, der


def _eval_polynomial(f, z, tol):
    if f.factored:
        v, d = _eval_factored(f, z)
    else:
        v, d = _eval_poly_coeffs(f.params[0], z)
    return v, d, 8 * EPS * np.maximum(np.abs(v), 1e-300) * (1 + np.abs(z))


def _eval_rational(f, z, tol):
    if f.factored:
        v, d = _eval_factored(f, z)
    else:
        with np.errstate(all="ignore"):
            P, dP = _eval_poly_coeffs(f.params[0], z)
            Q, dQ = _eval_poly_coeffs(f.params[1], z)
            v = P / Q
            d = (dP * Q - P * dQ) / (Q * Q)
    return v, d, 8 * EPS * np.abs(v) * (1 + np.abs(z))


_EVALUATORS = {
    "zeta": _eval_zeta,
    "eta": _eval_eta,
    "xi": _eval_xi,
    "chi": _eval_chi,
    "cosh": _eval_cosh,
    "polynomial": _eval_polynomial,
    "rational": _eval_rational,
}


# ------------------------------------------------------------ extended path

def _eval_mp(f, z, digits):
    with mpmath.workdps(digits + 10):
        z = mpmath.mpc(z)
        if f.name == "zeta":
            v, d, b = special.zeta_mp(z, digits)
        elif f.name in ("eta", "chi", "xi"):
            w = 1 - z if (f.name == "xi" and z.real < 0) else z
            v, d, b = special.eta_mp(w, digits)
            if f.name == "chi":
                m, a = f.params
                za = w - mpmath.mpc(a)
                v, d = za ** m * v, m * za ** (m - 1) * v + za ** m * d
            elif f.name == "xi":
                g = 1 + w / 2
                B = -mpmath.exp(-w / 2 * mpmath.log(mpmath.pi) + mpmath.loggamma(g))
                dB = B * (-mpmath.log(mpmath.pi) / 2 + mpmath.digamma(g) / 2)
                v, d = B * v, dB * v + B * d
                b = b * abs(B)
                if w is not z:
                    d = -d
        elif f.name == "cosh":
            v, d, b = mpmath.cosh(z), mpmath.sinh(z), 10.0 ** (-digits)
        elif f.factored:
            zeros, poles, scale = f.params
            v = mpmath.mpc(scale)
            L = mpmath.mpc(0)
            for r, m in zeros:
                v *= (z - mpmath.mpc(r)) ** m
                L += m / (z - mpmath.mpc(r)) if z != r else mpmath.inf
            for r, m in poles:
                v /= (z - mpmath.mpc(r)) ** m
                L -= m / (z - mpmath.mpc(r))
            d, b = v * L, 10.0 ** (-digits)
        else:
            coeffs = f.params[0] if f.name == "polynomial" else f.params
            if f.name == "polynomial":
                v = mpmath.polyval([mpmath.mpc(c) for c in coeffs], z, derivative=True)
                v, d = v
            else:
                P, dP = mpmath.polyval([mpmath.mpc(c) for c in coeffs[0]], z, derivative=True)
                Q, dQ = mpmath.polyval([mpmath.mpc(c) for c in coeffs[1]], z, derivative=True)
                v, d = P / Q, (dP * Q - P * dQ) / Q ** 2
            b = 10.0 ** (-digits)
    return EvalResult(v, d, float(b))


def eval_family(f: AnalyticFunction, z, target_abs_err: float = DEFAULT_ABS_ERR,
                precision: int | None = None, log_space: bool | None = None) -> EvalResult:
    """Value and derivative of ``f`` at ``z``.

    ``log_space`` only affects xi: None picks log-space composition above
    |Im z| = XI_DIRECT_SAFE; False forces the direct product, which raises
    OverflowDomain above that height.
    """
    if target_abs_err <= 0:
        raise ValueError("target_abs_err must be positive")
    if precision is not None:
        if f.pole_order(complex(z)):
            raise PoleHit(f"{f} has a pole at {complex(z)}")
        return _eval_mp(f, z, precision)
    z = as_point(z)
    if f.pole_order(z):
        raise PoleHit(f"{f} has a pole at {z}")
    if f.name == "xi":
        if log_space is False and abs(z.imag) > XI_DIRECT_SAFE:
            raise OverflowDomain(
                f"direct xi evaluation is limited to |Im z| <= {XI_DIRECT_SAFE:g}")
        use_log = True if log_space is None else log_space
        v, d, b = _eval_xi(f, np.array([z]), target_abs_err, log_space=use_log)
    else:
        v, d, b = f.values(np.array([z]), target_abs_err)
    val, der = complex(v[0]), complex(d[0])
    if not (np.isfinite(val) and np.isfinite(der)):
        raise PoleHit(f"{f} is not finite at {z}")
    return EvalResult(val, der, float(b[0]))

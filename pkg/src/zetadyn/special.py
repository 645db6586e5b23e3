"""Special functions at complex arguments.

``loggamma``, ``digamma`` and ``gamma`` use Stirling's series after an upward
shift, with reflection for Re z < 0. The Riemann zeta function is evaluated
by Euler-Maclaurin summation, which yields the value, the derivative (by
termwise differentiation) and an explicit truncation bound in one pass.

Two arithmetic back ends share the same formulas:

* binary64, vectorized over numpy arrays (``zeta_arrays``), used by the
  dynamics and rendering code;
* extended precision through mpmath (``precision=digits``), used where more
  than ~15 digits are required, e.g. for long continued fraction expansions.

Log values (log-gamma, log sin) are principal-branch only where stated; the
public API only exposes exponentiated combinations and ratios.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import mpmath
import numpy as np

from .errors import AccuracyUnreachable, PoleAt1, PoleHit

# Heights above this need the extended path or a larger cutoff budget.
T_MAX = 1000.0
EPS = float(np.finfo(float).eps)
LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)
DEFAULT_ABS_ERR = 1e-10

Number = Union[complex, float, int, "mpmath.mpc", "mpmath.mpf"]


@dataclass(frozen=True)
class EvalResult:
    """Value and first derivative of a function at one point.

    ``abs_error_bound`` bounds the error of ``value``: the series truncation
    bound plus a floating-point rounding estimate. The derivative comes from
    the same truncated series and is typically accurate to a few times the
    bound multiplied by log(cutoff).
    """

    value: complex
    derivative: complex
    abs_error_bound: float


def as_point(z) -> complex:
    """Validate a complex coordinate at the API boundary."""
    try:
        w = complex(z)
    except (TypeError, ValueError):
        raise TypeError(f"not a complex number: {z!r}") from None
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise ValueError(f"non-finite complex point: {z!r}")
    return w


# ---------------------------------------------------------------- Bernoulli

@lru_cache(maxsize=None)
def bernoulli_fractions(n: int) -> tuple:
    """Exact B_0..B_n (Akiyama-Tanigawa; B_1 = +1/2, unused here)."""
    out = []
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    return tuple(out)


@lru_cache(maxsize=None)
def _em_coefficients(p: int) -> tuple:
    """B_{2k}/(2k)! for k = 0..p as floats."""
    b = bernoulli_fractions(2 * p)
    return tuple(float(b[2 * k] / math.factorial(2 * k)) for k in range(p + 1))


@lru_cache(maxsize=None)
def _log_bernoulli_ratio(k: int) -> float:
    """log(|B_2k| / (2k)!) = log 2 + log zeta(2k) - 2k log(2 pi)."""
    if k == 1:
        zeta2k = math.pi ** 2 / 6
    else:
        zeta2k = math.fsum(n ** (-2.0 * k) for n in range(1, 60))
    return math.log(2.0) + math.log(zeta2k) - 2 * k * LOG_2PI


# ------------------------------------------------------------ gamma family

_STIRLING_TERMS = 12
_SHIFT_TO = 16.0


def _stirling_coeffs():
    b = bernoulli_fractions(2 * _STIRLING_TERMS)
    lg = [float(b[2 * k] / (2 * k * (2 * k - 1))) for k in range(1, _STIRLING_TERMS + 1)]
    dg = [float(b[2 * k] / (2 * k)) for k in range(1, _STIRLING_TERMS + 1)]
    return np.array(lg), np.array(dg)


_LG_COEFFS, _DG_COEFFS = _stirling_coeffs()


def _log_sin_pi(z):
    """log(sin(pi z)) without overflow for large |Im z|.

    sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z}) for Im z >= 0; the lower
    half-plane follows by conjugation.
    """
    z = np.asarray(z, dtype=complex)
    upper = z.imag >= 0
    w = np.where(upper, z, np.conj(z))
    val = np.log(0.5j) - 1j * np.pi * w + np.log1p(-np.exp(2j * np.pi * w))
    return np.where(upper, val, np.conj(val))


def _shift_count(z):
    return np.maximum(0, np.ceil(_SHIFT_TO - z.real)).astype(int)


def _loggamma_right(z):
    """Stirling series for Re z >= 0 after shifting to Re >= _SHIFT_TO."""
    k = _shift_count(z)
    acc = np.zeros_like(z)
    for j in range(int(k.max(initial=0))):
        m = j < k
        acc = np.where(m, acc + np.log(z + j), acc)
    w = z + k
    winv = 1.0 / w
    w2 = winv * winv
    series = np.zeros_like(z)
    for c in _LG_COEFFS[::-1]:
        series = series * w2 + c
    series = series * winv
    return (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI + series - acc


def loggamma(z):
    """log Gamma(z) for complex z (array or scalar).

    For Re z >= 0 the result is the branch continuous off the negative real
    axis (agrees with ``scipy.special.loggamma``). For Re z < 0 the
    reflection formula is used and the imaginary part may differ from that
    branch by a multiple of 2 pi.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    left = z.real < 0
    with np.errstate(divide="ignore", invalid="ignore"):
        if np.any(~left):
            out[~left] = _loggamma_right(z[~left])
        if np.any(left):
            zl = z[left]
            out[left] = LOG_PI - _log_sin_pi(zl) - _loggamma_right(1.0 - zl)
    return out[0] if scalar else out


def _digamma_right(z):
    k = _shift_count(z)
    acc = np.zeros_like(z)
    for j in range(int(k.max(initial=0))):
        m = j < k
        acc = np.where(m, acc + 1.0 / (z + j), acc)
    w = z + k
    winv = 1.0 / w
    w2 = winv * winv
    series = np.zeros_like(z)
    for c in _DG_COEFFS[::-1]:
        series = series * w2 + c
    series = series * w2
    return np.log(w) - 0.5 * winv - series - acc


def digamma(z):
    """psi(z) = Gamma'(z)/Gamma(z); reflection psi(z) = psi(1-z) - pi cot(pi z)."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    left = z.real < 0
    with np.errstate(divide="ignore", invalid="ignore"):
        if np.any(~left):
            out[~left] = _digamma_right(z[~left])
        if np.any(left):
            zl = z[left]
            out[left] = _digamma_right(1.0 - zl) - np.pi / np.tan(np.pi * zl)
    return out[0] if scalar else out


def gamma(z):
    """Gamma(z) = exp(loggamma(z)); raises PoleHit at non-positive integers."""
    z = np.asarray(z, dtype=complex)
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(bad):
        raise PoleHit("Gamma has a pole at non-positive integers")
    return np.exp(loggamma(z))


# --------------------------------------------------- Euler-Maclaurin zeta

_N_LEVELS = np.unique(np.round(np.geomspace(6, 6000, 48)).astype(int))
_P_CHOICES = np.array([2, 4, 6, 8, 10, 12, 15, 18, 22, 26, 30, 36])
_CHUNK_ELEMS = 1_500_000


def _choose_cutoffs(s, target):
    """Cheapest (N, p) per point whose truncation bound is below ``target``.

    Returns int arrays N, p; N == 0 marks points where no level suffices.
    """
    sigma = s.real
    jmax = 2 * int(_P_CHOICES.max()) + 2
    with np.errstate(divide="ignore"):
        logabs = np.log(np.abs(s[:, None] + np.arange(jmax)))
    cums = np.cumsum(logabs, axis=1)
    logN = np.log(_N_LEVELS.astype(float))
    log_target = math.log(target)
    best_cost = np.full(s.shape, np.inf)
    best_N = np.zeros(s.shape, dtype=int)
    best_p = np.zeros(s.shape, dtype=int)
    for p in _P_CHOICES:
        expo = sigma + 2 * p + 1
        valid = expo > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            a = (_log_bernoulli_ratio(p + 1) + cums[:, 2 * p]
                 + logabs[:, 2 * p + 1] - np.log(np.where(valid, expo, 1.0)))
        logb = a[:, None] - expo[:, None] * logN[None, :]
        ok = (logb < log_target) & valid[:, None]
        # first level that works is the cheapest for this p
        has = ok.any(axis=1)
        first = np.argmax(ok, axis=1)
        N = _N_LEVELS[first]
        cost = np.where(has, N + 0.5 * p, np.inf)
        better = cost < best_cost
        best_cost = np.where(better, cost, best_cost)
        best_N = np.where(better, N, best_N)
        best_p = np.where(better, p, best_p)
    return best_N, best_p


def _em_block(s, N, p):
    """Euler-Maclaurin pieces at fixed cutoff N and correction order p.

    With H = N^{1-s}, zeta(s) = R + H/(s-1). Returns R, R', H, H', the
    truncation bound and a rounding estimate, all arrays over ``s``.
    """
    n = np.arange(1, N, dtype=float)
    logn = np.log(n)
    coeffs = _em_coefficients(p + 1)
    logN = math.log(N)
    R = np.empty_like(s)
    dR = np.empty_like(s)
    rnd = np.empty(s.shape)
    step = max(1, _CHUNK_ELEMS // max(N, 1))
    for lo in range(0, s.size, step):
        sl = s[lo:lo + step]
        terms = np.exp(-np.outer(sl, logn))
        R[lo:lo + step] = terms.sum(axis=1)
        # row-wise reductions rather than BLAS products, so a point's value
        # does not depend on which other points share the batch
        dR[lo:lo + step] = -(terms * logn).sum(axis=1)
        # phase error of exp(-s log n) grows like |s| log n
        rnd[lo:lo + step] = (np.abs(terms) * (1.0 + logn)).sum(axis=1) * (1.0 + np.abs(sl))
    NmS = np.exp(-s * logN)
    H = N * NmS
    dH = -logN * H
    R += 0.5 * NmS
    dR += -0.5 * logN * NmS
    P = s.copy()
    dP = np.ones_like(s)
    powN = NmS / N
    absT = np.zeros(s.shape)
    for k in range(1, p + 2):
        if k > 1:
            for j in (2 * k - 3, 2 * k - 2):
                dP = dP * (s + j) + P
                P = P * (s + j)
            powN = powN / (N * N)
        if k == p + 1:
            expo = s.real + 2 * p + 1
            trunc = (abs(coeffs[k]) * np.abs(P) * np.abs(powN)
                     * np.abs(s + 2 * p + 1) / expo)
            break
        T = coeffs[k] * P * powN
        R += T
        dR += coeffs[k] * (dP - logN * P) * powN
        absT += np.abs(T)
    rnd = EPS * (rnd + 4.0 * (np.abs(H) + absT + np.abs(NmS)) * (1.0 + np.abs(s)))
    return R, dR, H, dH, trunc, rnd


def _em_arrays(s, target):
    """Direct Euler-Maclaurin over an array; groups points by cutoff."""
    R = np.full(s.shape, np.nan + 0j)
    dR = R.copy()
    H = R.copy()
    dH = R.copy()
    bound = np.full(s.shape, np.inf)
    Ns, ps = _choose_cutoffs(s, target)
    for N, p in sorted(set(zip(Ns.tolist(), ps.tolist()))):
        if N == 0:
            continue
        m = (Ns == N) & (ps == p)
        r, dr, h, dh, tr, rn = _em_block(s[m], N, p)
        R[m], dR[m], H[m], dH[m] = r, dr, h, dh
        bound[m] = tr + rn
    return R, dR, H, dH, bound


def _reflection_factor(s):
    """F(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) and F'(s), for Re s < 1/2."""
    one_minus = 1.0 - s
    psi = digamma(one_minus)
    base = s * math.log(2.0) + (s - 1.0) * LOG_PI + loggamma(one_minus)
    F = np.exp(base + _log_sin_pi(0.5 * s))
    # near the real axis expand with sin/cos directly (cot is singular at
    # the trivial zeros); far from it sin and cos overflow but cot is tame
    near = np.abs(s.imag) < 20.0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        G = np.exp(np.where(near, base, 0.0))
        half = 0.5 * np.pi * np.where(near, s, 0.0)
        dF_near = G * ((LOG_2PI - psi) * np.sin(half) + 0.5 * np.pi * np.cos(half))
        cot = 1.0 / np.tan(0.5 * np.pi * np.where(near, 1.0, s))
        dF_far = F * (LOG_2PI - psi + 0.5 * np.pi * cot)
    dF = np.where(near, dF_near, dF_far)
    return F, dF


def zeta_arrays(s, target_abs_err: float = DEFAULT_ABS_ERR, method: str = "auto"):
    """Vectorized binary64 zeta.

    Returns ``(value, derivative, abs_error_bound)`` arrays. ``method`` is
    ``"auto"`` (reflection for Re s < 0, direct summation otherwise) or
    ``"direct"`` (summation everywhere; loses accuracy for Re s < 0).
    Points at s = 1, or where no cutoff meets ``target_abs_err``, get NaN
    values and an infinite bound.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    val = np.full(s.shape, np.nan + 0j)
    der = val.copy()
    bound = np.full(s.shape, np.inf)
    pole = s == 1
    reflect = (s.real < 0) if method == "auto" else np.zeros(s.shape, bool)
    direct = ~reflect & ~pole
    with np.errstate(all="ignore"):
        if np.any(direct):
            sd = s[direct]
            R, dR, H, dH, b = _em_arrays(sd, 0.5 * target_abs_err)
            inv = 1.0 / (sd - 1.0)
            val[direct] = R + H * inv
            der[direct] = dR + dH * inv - H * inv * inv
            bound[direct] = b
        if np.any(reflect):
            sr = s[reflect]
            s1 = 1.0 - sr
            R, dR, H, dH, b = _em_arrays(s1, 0.5 * target_abs_err)
            inv = 1.0 / (s1 - 1.0)
            z1 = R + H * inv
            dz1 = dR + dH * inv - H * inv * inv
            F, dF = _reflection_factor(sr)
            val[reflect] = F * z1
            der[reflect] = dF * z1 - F * dz1
            rel = 64 * EPS * (1.0 + np.abs(sr)) * (1.0 + np.abs(np.log(np.abs(F) + 1e-300)))
            bound[reflect] = np.abs(F) * b + rel * np.abs(F * z1)
    bad = ~np.isfinite(val) | ~np.isfinite(der)
    bound[bad] = np.inf
    return val, der, bound


def eta_arrays(s, target_abs_err: float = DEFAULT_ABS_ERR):
    """(s-1) zeta(s) and its derivative; finite and smooth through s = 1."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    val = np.full(s.shape, np.nan + 0j)
    der = val.copy()
    bound = np.full(s.shape, np.inf)
    left = s.real < 0
    with np.errstate(all="ignore"):
        if np.any(~left):
            sd = s[~left]
            R, dR, H, dH, b = _em_arrays(sd, 0.5 * target_abs_err)
            val[~left] = (sd - 1.0) * R + H
            der[~left] = R + (sd - 1.0) * dR + dH
            bound[~left] = b * np.abs(sd - 1.0) + b
        if np.any(left):
            sl = s[left]
            z, dz, b = zeta_arrays(sl, target_abs_err)
            val[left] = (sl - 1.0) * z
            der[left] = z + (sl - 1.0) * dz
            bound[left] = b * np.abs(sl - 1.0)
    bad = ~np.isfinite(val) | ~np.isfinite(der)
    bound[bad] = np.inf
    return val, der, bound


# ------------------------------------------------- extended precision path

def _choose_cutoff_mp(s, log_target):
    sigma = float(s.real)
    sa = complex(s)
    best = None
    for N in _N_LEVELS.tolist() + [8000, 12000, 20000]:
        logN = math.log(N)
        acc = math.log(abs(sa)) if sa != 0 else -math.inf  # j = 0
        for p in range(1, 400):
            for j in (2 * p - 1, 2 * p):
                acc += math.log(abs(sa + j)) if sa + j != 0 else -math.inf
            expo = sigma + 2 * p + 1
            if expo <= 0:
                continue
            logb = (_log_bernoulli_ratio(p + 1) + acc + math.log(abs(sa + 2 * p + 1))
                    - math.log(expo) - expo * logN)
            if logb < log_target:
                cost = N + 0.5 * p
                if best is None or cost < best[0]:
                    best = (cost, N, p, logb)
                break
        if best is not None and N > 2 * best[0]:
            break
    if best is None:
        raise AccuracyUnreachable(f"no Euler-Maclaurin cutoff reaches the target at s={sa}")
    return best[1], best[2], best[3]


def _em_mp(s, digits):
    """Euler-Maclaurin pieces in mpmath arithmetic (current context precision)."""
    log_target = -(digits + 2) * math.log(10.0)
    N, p, logb = _choose_cutoff_mp(s, log_target)
    b = bernoulli_fractions(2 * p)
    R = mpmath.mpc(0)
    dR = mpmath.mpc(0)
    for n in range(1, N):
        ln = mpmath.log(n)
        term = mpmath.exp(-s * ln)
        R += term
        dR -= ln * term
    logN = mpmath.log(N)
    NmS = mpmath.exp(-s * logN)
    H = N * NmS
    dH = -logN * H
    R += NmS / 2
    dR -= logN * NmS / 2
    P = s
    dP = mpmath.mpc(1)
    powN = NmS / N
    for k in range(1, p + 1):
        if k > 1:
            for j in (2 * k - 3, 2 * k - 2):
                dP = dP * (s + j) + P
                P = P * (s + j)
            powN = powN / (N * N)
        c = mpmath.mpf(b[2 * k].numerator) / (b[2 * k].denominator * mpmath.factorial(2 * k))
        R += c * P * powN
        dR += c * (dP - logN * P) * powN
    return R, dR, H, dH, math.exp(logb)


def _guard_digits(s) -> int:
    sc = complex(s)
    if sc.real >= 0:
        return 10
    return 15 + int(math.ceil((1 - sc.real) * math.log10(abs(sc) + 10)))


def zeta_mp(s, digits: int):
    """zeta(s), zeta'(s) and a bound with about ``digits`` correct digits.

    Direct summation at every s; for Re s < 0 guard digits absorb the
    cancellation among the large summands.
    """
    guard = _guard_digits(s)
    with mpmath.workdps(digits + guard):
        s = mpmath.mpc(s)
        if s == 1:
            raise PoleAt1("zeta has a pole at s = 1")
        R, dR, H, dH, trunc = _em_mp(s, digits)
        inv = 1 / (s - 1)
        val = R + H * inv
        der = dR + dH * inv - H * inv * inv
    with mpmath.workdps(digits + 5):
        return +val, +der, trunc + 10.0 ** (-digits - 2)


def eta_mp(s, digits: int):
    guard = _guard_digits(s)
    with mpmath.workdps(digits + guard):
        s = mpmath.mpc(s)
        R, dR, H, dH, trunc = _em_mp(s, digits)
        val = (s - 1) * R + H
        der = R + (s - 1) * dR + dH
    with mpmath.workdps(digits + 5):
        return +val, +der, trunc * (1 + abs(complex(s))) + 10.0 ** (-digits - 2)


# ---------------------------------------------------------- public scalars

def eval_zeta(s, target_abs_err: float = DEFAULT_ABS_ERR, precision: int | None = None,
              method: str = "auto") -> EvalResult:
    """Riemann zeta and its derivative at one point.

    ``precision=None`` runs in binary64 and is documented for
    |Im s| <= ``T_MAX``; an integer selects the mpmath path with that many
    decimal digits, and the result fields are then mpmath numbers.
    """
    if target_abs_err <= 0:
        raise ValueError("target_abs_err must be positive")
    if precision is not None:
        digits = max(precision, int(math.ceil(-math.log10(target_abs_err))))
        v, d, b = zeta_mp(s, digits)
        return EvalResult(v, d, b)
    s = as_point(s)
    if s == 1:
        raise PoleAt1("zeta has a pole at s = 1")
    if abs(s.imag) > T_MAX:
        raise AccuracyUnreachable(f"|Im s| = {abs(s.imag):g} exceeds T_MAX = {T_MAX:g} in binary64")
    if method == "direct" and s.real < 0:
        # summation at Re s < 0 cancels badly in binary64; run it in mpmath
        v, d, b = zeta_mp(s, 20)
        return EvalResult(complex(v), complex(d), max(float(b), EPS * abs(complex(v))))
    val, der, bound = zeta_arrays(np.array([s]), target_abs_err, method=method)
    b = float(bound[0])
    if not b <= target_abs_err:
        raise AccuracyUnreachable(
            f"zeta({s}) error bound {b:.3g} exceeds target {target_abs_err:.3g}")
    return EvalResult(complex(val[0]), complex(der[0]), b)


def functional_equation_residual(s) -> float:
    """|zeta(s) - 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)| / max(1, |zeta(s)|).

    Both zeta values come from direct summation (no reflection), so the two
    sides are computed independently.
    """
    s = as_point(s)
    if s == 1 or s == 0:
        raise PoleHit("functional equation has a pole at s = 1 or 1 - s = 1")
    if s.imag == 0 and s.real >= 1 and s.real == round(s.real):
        raise PoleHit("Gamma(1-s) has a pole at s = 1, 2, 3, ...")
    if abs(s.imag) > T_MAX:
        raise AccuracyUnreachable(f"|Im s| exceeds T_MAX = {T_MAX:g}")
    vals, _, _ = zeta_arrays(np.array([s, 1 - s]), 1e-12, method="direct")
    lhs, rhs_zeta = complex(vals[0]), complex(vals[1])
    log_pref = (s * math.log(2.0) + (s - 1) * LOG_PI + complex(_log_sin_pi(s / 2))
                + complex(loggamma(1 - s)))
    rhs = cmath.exp(log_pref) * rhs_zeta
    return abs(lhs - rhs) / max(1.0, abs(lhs))

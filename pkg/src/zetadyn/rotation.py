"""Rotation numbers of indifferent fixed points and their continued fractions.

A zero 1/2 + i*gamma on the critical line is a fixed point of the nu-map of
zeta with multiplier 1 - 1/(1/2 + i*gamma) = exp(2 pi i theta), where
theta = arctan(1/(2 gamma)) / pi.

Continued fractions are computed on intervals in exact rational arithmetic:
a partial quotient is reported as certified only if both ends of the input
interval agree on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from statistics import mean

import mpmath

from .errors import IntervalTooWide, ZeroUnavailable
from .zeros import BINARY64_DIGITS, ZeroRecord, refine_to_digits


@dataclass(frozen=True)
class RotationNumber:
    theta: object
    gamma: object
    precision_digits: int
    # |exp(2 pi i theta) - (1 - 1/(1/2 + i gamma))|
    multiplier_residual: float


def gamma_to_theta(gamma, precision_digits: int = BINARY64_DIGITS) -> RotationNumber:
    """theta = arctan(1/(2 gamma)) / pi at ~``precision_digits`` digits."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    with mpmath.workdps(precision_digits + 15):
        g = mpmath.mpf(gamma)
        theta = mpmath.atan(1 / (2 * g)) / mpmath.pi
        lam = 1 - 1 / mpmath.mpc(mpmath.mpf(1) / 2, g)
        resid = float(abs(mpmath.expjpi(2 * theta) - lam))
        if precision_digits <= BINARY64_DIGITS:
            return RotationNumber(float(theta), float(g), precision_digits, resid)
        with mpmath.workdps(precision_digits + 5):
            return RotationNumber(+theta, g, precision_digits, resid)


def theta_to_gamma(theta):
    """gamma = 1 / (2 tan(pi theta)), in the precision of the input."""
    if isinstance(theta, mpmath.mpf):
        return 1 / (2 * mpmath.tan(mpmath.pi * theta))
    return 1.0 / (2.0 * math.tan(math.pi * theta))


# ------------------------------------------------------ continued fractions

def to_fraction(x) -> Fraction:
    """Exact rational value of a float, mpf, Fraction, int or decimal string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        return Fraction(int(man)) * (Fraction(2) ** int(exp))
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def _cf_terms(x: Fraction, n: int):
    """Partial quotients a_1, a_2, ... of x in (0, 1]; stops if x is exhausted."""
    out = []
    while len(out) < n and x != 0:
        y = 1 / x
        a = y.numerator // y.denominator
        out.append(a)
        x = y - a
    return out


@dataclass(frozen=True)
class ContinuedFractionExpansion:
    """theta = 1/(a_1 + 1/(a_2 + ...)); the first ``certified_count`` terms hold
    for every number in the input interval."""

    quotients: tuple
    certified_count: int
    source_precision_digits: int | None = None

    @property
    def certified(self) -> tuple:
        return self.quotients[: self.certified_count]

    @property
    def uncertified(self) -> tuple:
        return self.quotients[self.certified_count:]

    def bounded_type_summary(self) -> dict:
        """Max and mean of the certified quotients (descriptive only)."""
        c = self.certified
        return {"max": max(c) if c else None, "mean": mean(c) if c else None}

    def format(self) -> str:
        parts = [str(a) for a in self.certified] + [f"{a}?" for a in self.uncertified]
        return "[" + ",".join(parts) + "]"


def continued_fraction(lo, hi=None, max_terms: int = 50,
                       source_precision_digits: int | None = None) -> ContinuedFractionExpansion:
    """Continued fraction of every number in [lo, hi] with 0 < lo <= hi < 1.

    Quotients are emitted while the expansions of both ends agree; the rest,
    up to ``max_terms``, come from the midpoint and are uncertified.
    ``hi=None`` means a point interval.
    """
    a = to_fraction(lo)
    b = a if hi is None else to_fraction(hi)
    if b < a:
        a, b = b, a
    if not (0 < a and b <= 1):
        raise ValueError("need 0 < lo <= hi <= 1")
    # one extra term tells truncation apart from termination
    qa = _cf_terms(a, max_terms + 1)
    qb = _cf_terms(b, max_terms + 1)
    k = 0
    # a shared quotient is only certified if neither end terminated right after it
    while k < min(len(qa), len(qb)) and qa[k] == qb[k]:
        k += 1
    if a == b:
        k = len(qa)
    elif k > 0 and (k == len(qa) or k == len(qb)):
        k -= 1
    k = min(k, max_terms)
    if k == 0:
        raise IntervalTooWide(f"interval [{float(a)}, {float(b)}] shares no partial quotient")
    mid = _cf_terms((a + b) / 2, max_terms)
    quotients = tuple(qa[:k]) + tuple(mid[k:])
    return ContinuedFractionExpansion(quotients, k, source_precision_digits)


def convergents(quotients):
    """(p_k, q_k) for theta = [a_1, a_2, ...] (leading integer part 0)."""
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    out = []
    for a in quotients:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return out


def theta_interval(gamma, digits: int):
    """Rational enclosure of theta for an ordinate known to ``digits`` digits."""
    with mpmath.workdps(digits + 25):
        g = mpmath.mpf(gamma)
        e = int(mpmath.floor(mpmath.log10(g)))
        err = mpmath.mpf(10) ** (e - digits + 1)
        g_lo, g_hi = g - err, g + err
        # theta decreases in gamma; pad for rounding in atan
        pad = mpmath.mpf(10) ** (-(digits + 20))
        t_lo = mpmath.atan(1 / (2 * g_hi)) / mpmath.pi - pad
        t_hi = mpmath.atan(1 / (2 * g_lo)) / mpmath.pi + pad
        return to_fraction(t_lo), to_fraction(t_hi)


# ---------------------------------------------------------------- table rows

@dataclass(frozen=True)
class RotationRow:
    n: int
    gamma: object
    theta: object
    expansion: ContinuedFractionExpansion

    @property
    def quotients(self):
        return self.expansion.quotients

    @property
    def certified_count(self) -> int:
        return self.expansion.certified_count


def rotation_row(n: int, digits: int, cache=None, max_terms: int = 50) -> RotationRow:
    """gamma_n -> theta_n -> continued fraction, from a zero cache.

    ``cache`` is a list of ZeroRecord; the zero must be present with at
    least ``digits`` certified digits.
    """
    rec = None
    for r in cache or ():
        if r.index == n and r.precision_digits >= digits:
            rec = r
            break
    if rec is None:
        raise ZeroUnavailable(f"zero #{n} is not cached with >= {digits} digits")
    rot = gamma_to_theta(rec.gamma, digits)
    lo, hi = theta_interval(rec.gamma, digits)
    cf = continued_fraction(lo, hi, max_terms, source_precision_digits=digits)
    return RotationRow(n, rec.gamma, rot.theta, cf)


def ensure_cached(cache, indices, digits: int) -> list[ZeroRecord]:
    """Return ``cache`` extended so each requested index has ``digits`` digits."""
    from .zeros import zeros_up_to_index

    by_index = {r.index: r for r in cache or ()}
    missing = [n for n in indices if n not in by_index]
    if missing:
        for r in zeros_up_to_index(max(missing), BINARY64_DIGITS):
            by_index.setdefault(r.index, r)
    for n in indices:
        if by_index[n].precision_digits < digits:
            by_index[n] = refine_to_digits(by_index[n], digits)
    return [by_index[k] for k in sorted(by_index)]

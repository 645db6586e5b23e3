"""Non-trivial zeros of zeta on the critical line.

Zeros are bracketed by sign changes of the Hardy function Z(t), refined by
Newton's method on t -> zeta(1/2 + it), and cross-checked against an
argument-principle count over the rectangle 0 <= Re s <= 1.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np
from scipy.optimize import brentq

from . import special
from .errors import AccuracyUnreachable, FormatError, MissedZeroSuspected

log = logging.getLogger(__name__)

CSV_HEADER = ("index", "gamma", "precision_digits", "residual", "method")
METHODS = ("sign-bracket+refine", "imported")
BINARY64_DIGITS = 14
DEFAULT_STEP = 0.05


@dataclass(frozen=True)
class ZeroRecord:
    """The zero 1/2 + i*gamma of zeta, the ``index``-th above the real axis.

    ``gamma`` is a float for records with at most BINARY64_DIGITS digits and
    an mpmath ``mpf`` otherwise.
    """

    index: int
    gamma: float
    precision_digits: int
    residual: float
    method: str = "sign-bracket+refine"
    newton_residuals: tuple = field(default=(), compare=False, repr=False)

    @property
    def alpha(self) -> complex:
        return complex(0.5, float(self.gamma))


# ----------------------------------------------------------- Hardy Z

def riemann_siegel_theta(t):
    t = np.asarray(t, dtype=float)
    return special.loggamma(0.25 + 0.5j * t).imag - 0.5 * t * special.LOG_PI


def hardy_z_array(t, target_abs_err: float = 1e-12):
    """Z(t) and |Im e^{i theta} zeta(1/2+it)| (should vanish) on an array."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    z, _, _ = special.zeta_arrays(0.5 + 1j * t, target_abs_err)
    prod = np.exp(1j * riemann_siegel_theta(t)) * z
    return prod.real, np.abs(prod.imag)


def hardy_z(t: float) -> float:
    """Hardy's function Z(t) = e^{i theta(t)} zeta(1/2 + it), a real number."""
    t = float(t)
    if abs(t) > special.T_MAX:
        raise AccuracyUnreachable(f"|t| = {abs(t):g} exceeds T_MAX = {special.T_MAX:g}")
    val, imag = hardy_z_array([t])
    if not imag[0] < 1e-9:
        raise AccuracyUnreachable(f"Z({t}) has imaginary part {imag[0]:.3g}")
    return float(val[0])


# ------------------------------------------------------- argument principle

def _winding(f, path, max_depth: int = 30) -> float:
    """Winding number of f(z) around 0 along a closed polyline.

    Segments are bisected until consecutive arguments differ by < pi/4.
    ``f`` maps a complex array to a complex array.
    """
    pts = np.asarray(path, dtype=complex)
    vals = f(pts)
    a, b, fa, fb = pts[:-1], pts[1:], vals[:-1], vals[1:]
    total = 0.0
    for _ in range(max_depth):
        d = np.angle(fb / fa)
        ok = np.abs(d) < math.pi / 4
        total += d[ok].sum()
        if ok.all():
            break
        a, b, fa, fb = a[~ok], b[~ok], fa[~ok], fb[~ok]
        mid = 0.5 * (a + b)
        fm = f(mid)
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
        fa, fb = np.concatenate([fa, fm]), np.concatenate([fm, fb])
    else:
        raise MissedZeroSuspected("argument tracking did not resolve along the contour")
    return total / (2 * math.pi)


def _eta_values(z):
    v, _, _ = special.eta_arrays(z, 1e-10)
    return v


def count_zeros_rectangle(t_lo: float, t_hi: float, re_lo: float = 0.0, re_hi: float = 1.0,
                          spacing: float = DEFAULT_STEP) -> int:
    """Zeros of zeta with re_lo < Re s < re_hi and t_lo < Im s < t_hi.

    Winds (s - 1) zeta(s) instead of zeta so the pole at s = 1 is harmless.
    """
    n_v = max(8, int(math.ceil((t_hi - t_lo) / spacing)))
    n_h = max(8, int(math.ceil((re_hi - re_lo) / spacing)))
    right = re_hi + 1j * np.linspace(t_lo, t_hi, n_v + 1)
    top = np.linspace(re_hi, re_lo, n_h + 1) + 1j * t_hi
    left = re_lo + 1j * np.linspace(t_hi, t_lo, n_v + 1)
    bottom = np.linspace(re_lo, re_hi, n_h + 1) + 1j * t_lo
    path = np.concatenate([right, top[1:], left[1:], bottom[1:]])
    w = _winding(_eta_values, path)
    n = int(round(w))
    if abs(w - n) > 0.05:
        raise MissedZeroSuspected(f"non-integral winding {w:.4f} on the rectangle")
    return n


# ----------------------------------------------------------- refinement

def _newton_binary64(t0: float, max_iter: int = 12):
    """Newton on t -> zeta(1/2+it); returns (t, residual history)."""
    t = t0
    hist = []
    for _ in range(max_iter):
        v, d, _ = special.zeta_arrays(np.array([0.5 + 1j * t]), 1e-14)
        r = abs(complex(v[0]))
        hist.append(r)
        step = (1j * complex(v[0]) / complex(d[0])).real
        t += step
        if abs(step) < 4 * special.EPS * abs(t):
            break
    v, _, _ = special.zeta_arrays(np.array([0.5 + 1j * t]), 1e-14)
    hist.append(abs(complex(v[0])))
    return t, tuple(hist)


def _newton_mp(t0, digits: int, max_iter: int = 40):
    t = mpmath.mpf(t0)
    hist = []
    with mpmath.workdps(digits + 12):
        tol = mpmath.mpf(10) ** (-(digits + 4)) * max(1, abs(t))
        for _ in range(max_iter):
            v, d, _ = special.zeta_mp(mpmath.mpc(0.5, t), digits + 6)
            hist.append(float(abs(v)))
            step = mpmath.re(1j * v / d)
            t += step
            if abs(step) < tol:
                break
        else:
            raise AccuracyUnreachable(f"extended Newton did not converge near t={float(t0)}")
        v, _, _ = special.zeta_mp(mpmath.mpc(0.5, t), digits + 6)
        hist.append(float(abs(v)))
    return t, tuple(hist)


def quantize_gamma(gamma, digits: int):
    """Round an extended-precision ordinate to digits + 3 significant digits.

    Records keep three guard digits so that CSV storage is exact.
    """
    with mpmath.workdps(digits + 10):
        return mpmath.mpf(mpmath.nstr(mpmath.mpf(gamma), digits + 3, strip_zeros=False))


def refine_zero(t_a: float, t_b: float, digits: int = BINARY64_DIGITS):
    """Refine a sign-change bracket [t_a, t_b] of Z to ``digits`` digits.

    Returns (gamma, residual, residual history).
    """
    # a few bracketing steps, then Newton for the last digits
    t0 = brentq(lambda t: hardy_z_array([t])[0][0], t_a, t_b, xtol=1e-3 * (t_b - t_a), rtol=1e-6)
    t, hist = _newton_binary64(t0)
    if not (t_a - 1e-6 <= t <= t_b + 1e-6):
        t = brentq(lambda u: hardy_z_array([u])[0][0], t_a, t_b, xtol=1e-15, rtol=4 * special.EPS)
        t, hist = _newton_binary64(t)
    if digits <= BINARY64_DIGITS:
        return float(t), hist[-1], hist
    tm, hist_mp = _newton_mp(t, digits)
    tm = quantize_gamma(tm, digits)
    with mpmath.workdps(digits + 12):
        v, _, _ = special.zeta_mp(mpmath.mpc(0.5, tm), digits + 6)
    return tm, float(abs(v)), hist + hist_mp


# --------------------------------------------------------------- scanning

def _scan(t_lo, t_hi, step):
    n = max(2, int(math.ceil((t_hi - t_lo) / step)) + 1)
    ts = np.linspace(t_lo, t_hi, n)
    zs, imag = hardy_z_array(ts)
    if np.any(imag > 1e-6 * np.maximum(1.0, np.abs(zs))):
        raise AccuracyUnreachable("Hardy Z self-check failed during scan")
    return ts, zs


def _suspicious(ts, zs):
    """Grid intervals around local minima of |Z| with no sign change."""
    a = np.abs(zs)
    idx = []
    for i in range(1, len(ts) - 1):
        if a[i] < a[i - 1] and a[i] < a[i + 1] and zs[i - 1] * zs[i + 1] > 0 \
                and zs[i - 1] * zs[i] > 0 and a[i] < 0.25 * max(a[i - 1], a[i + 1]):
            idx.append(i)
    return idx


def _brackets(t_lo, t_hi, step):
    ts, zs = _scan(t_lo, t_hi, step)
    for i in _suspicious(ts, zs):
        sub = np.linspace(ts[i - 1], ts[i + 1], 33)
        zsub = hardy_z_array(sub)[0]
        ts = np.concatenate([ts, sub[1:-1]])
        zs = np.concatenate([zs, zsub[1:-1]])
    order = np.argsort(ts)
    ts, zs = ts[order], zs[order]
    out = []
    for i in range(len(ts) - 1):
        if zs[i] == 0:
            out.append((ts[i] - 1e-9, ts[i] + 1e-9))
        elif zs[i] * zs[i + 1] < 0:
            out.append((ts[i], ts[i + 1]))
    return out


def _edge_safe(t, direction):
    """Move an interval end off a zero so the contour avoids it."""
    if t <= 0:
        return t
    for _ in range(50):
        if abs(hardy_z_array([t])[0][0]) > 1e-4:
            return t
        t += direction * 1e-3
    return t


def find_zeros(t_lo: float, t_hi: float, target_digits: int = 10, step: float = DEFAULT_STEP,
               check_count: bool = True) -> list[ZeroRecord]:
    """All zeros 1/2 + i*gamma with t_lo < gamma < t_hi, sorted by gamma.

    Raises MissedZeroSuspected if the argument-principle count over
    0 <= Re s <= 1 disagrees with the number of sign changes found after
    two rounds of step halving.
    """
    if not 0 <= t_lo < t_hi <= special.T_MAX:
        raise ValueError(f"need 0 <= t_lo < t_hi <= {special.T_MAX:g}")
    lo, hi = _edge_safe(t_lo, -1), _edge_safe(t_hi, +1)
    lo = max(lo, 0.0)
    expected = count_zeros_rectangle(lo, hi) if check_count else None
    for attempt in range(3):
        br = _brackets(lo, hi, step / 2 ** attempt)
        if expected is None or len(br) == expected:
            break
        log.info("sign changes %d != argument count %d; halving step", len(br), expected)
    else:
        raise MissedZeroSuspected(
            f"found {len(br)} sign changes in [{lo}, {hi}] but the argument principle counts "
            f"{expected} zeros", found=len(br), expected=expected)
    first_index = 1 + (count_zeros_rectangle(0.0, lo) if lo > 0 else 0)
    records = []
    for k, (a, b) in enumerate(br):
        g, res, hist = refine_zero(a, b, target_digits)
        records.append(ZeroRecord(first_index + k, g, target_digits, res,
                                  "sign-bracket+refine", hist))
    records = [r for r in records if t_lo < float(r.gamma) < t_hi]
    _check_sorted(records)
    return records


def zeros_up_to_index(n: int, digits: int = 10) -> list[ZeroRecord]:
    """The first ``n`` zeros (binary64 scan, optional extended refinement)."""
    T = 20.0
    while _rvm_count(T) < n + 2:
        T *= 1.25
    T = min(T, special.T_MAX)
    recs = find_zeros(0.0, T, digits)
    if len(recs) < n:
        raise AccuracyUnreachable(f"only {len(recs)} zeros below T_MAX")
    return recs[:n]


def _rvm_count(T: float) -> float:
    """Smooth Riemann-von Mangoldt approximation to the zero count below T."""
    x = T / (2 * math.pi)
    return x * math.log(x / math.e) + 7 / 8


def _check_sorted(records):
    for a, b in zip(records, records[1:]):
        if not float(b.gamma) > float(a.gamma):
            raise ValueError("zero ordinates must be strictly increasing")


# ------------------------------------------------------------ persistence

def _fmt_gamma(r: ZeroRecord) -> str:
    if isinstance(r.gamma, mpmath.mpf):
        return mpmath.nstr(r.gamma, r.precision_digits + 3, strip_zeros=False)
    # shortest repr is exact for binary64 and has at least the certified digits
    return repr(float(r.gamma))


def dumps_zeros(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([r.index, _fmt_gamma(r), r.precision_digits, repr(float(r.residual)), r.method])
    return buf.getvalue()


def store_zeros(records, path) -> None:
    records = list(records)
    _check_sorted(records)
    Path(path).write_text(dumps_zeros(records), encoding="utf-8", newline="\n")


def loads_zeros(text: str) -> list[ZeroRecord]:
    lines = text.split("\n")
    if not lines or lines[0].strip() != ",".join(CSV_HEADER):
        raise FormatError(f"expected header {','.join(CSV_HEADER)!r}", line=1)
    out = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(CSV_HEADER):
            raise FormatError(f"expected {len(CSV_HEADER)} fields, got {len(parts)}", line=lineno)
        try:
            index = int(parts[0])
            digits = int(parts[2])
            residual = float(parts[3])
            if digits > BINARY64_DIGITS:
                with mpmath.workdps(digits + 10):
                    gamma = mpmath.mpf(parts[1])
            else:
                gamma = float(parts[1])
        except ValueError as exc:
            raise FormatError(str(exc), line=lineno) from None
        method = parts[4].strip()
        if method not in METHODS:
            raise FormatError(f"unknown method {method!r}", line=lineno)
        if index < 1 or not float(gamma) > 0:
            raise FormatError("index must be >= 1 and gamma > 0", line=lineno)
        if out and not (float(gamma) > float(out[-1].gamma) and index > out[-1].index):
            raise FormatError("gamma and index must be strictly increasing", line=lineno)
        out.append(ZeroRecord(index, gamma, digits, residual, method))
    return out


def load_zeros(path) -> list[ZeroRecord]:
    return loads_zeros(Path(path).read_text(encoding="utf-8"))


def refine_to_digits(record: ZeroRecord, digits: int) -> ZeroRecord:
    """Re-refine a cached zero to ``digits`` digits with extended Newton steps."""
    if digits <= record.precision_digits:
        return record
    if digits <= BINARY64_DIGITS:
        t, hist = _newton_binary64(float(record.gamma))
        return ZeroRecord(record.index, float(t), digits, hist[-1], record.method, hist)
    tm, hist = _newton_mp(record.gamma, digits)
    tm = quantize_gamma(tm, digits)
    with mpmath.workdps(digits + 12):
        v, _, _ = special.zeta_mp(mpmath.mpc(0.5, tm), digits + 6)
    return ZeroRecord(record.index, tm, digits, float(abs(v)), record.method, hist)

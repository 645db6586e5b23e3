import mpmath
import numpy as np
import pytest

from zetadyn import special, zeros as Z
from zetadyn.errors import FormatError, MissedZeroSuspected
from zetadyn.zeros import ZeroRecord


def test_hardy_z_examples():
    assert abs(Z.hardy_z(14.134725)) < 1e-6
    assert abs(Z.hardy_z(0.0) - (-1.4603545)) < 1e-6
    # gamma_2 = 21.022 lies just above 21.0, so the bracket must reach past it
    assert np.sign(Z.hardy_z(14.2)) == np.sign(Z.hardy_z(21.0)) == np.sign(mpmath.siegelz(21.0))
    assert np.sign(Z.hardy_z(14.2)) != np.sign(Z.hardy_z(21.1))


def test_hardy_z_is_real_and_matches_mpmath():
    t = np.linspace(0.5, 300, 50)
    z, imag = Z.hardy_z_array(t)
    assert np.all(imag < 1e-9)
    ref = np.array([float(mpmath.siegelz(x)) for x in t])
    assert np.allclose(z, ref, atol=1e-9)


def test_find_zeros_first_four():
    recs = Z.find_zeros(10, 32, 6)
    assert [r.index for r in recs] == [1, 2, 3, 4]
    assert [round(r.gamma, 4) for r in recs] == [14.1347, 21.022, 25.0109, 30.4249]
    assert all(r.residual < 1e-8 for r in recs)
    assert all(r.method == "sign-bracket+refine" for r in recs)


def test_find_zeros_empty_and_window():
    assert Z.find_zeros(0, 10, 6) == []
    recs = Z.find_zeros(45, 52, 6)
    near = [r for r in recs if abs(r.gamma - 49.7738) < 1e-3]
    assert len(near) == 1 and near[0].index == 10


def test_zero_count_below_50(first_zeros):
    recs = Z.find_zeros(0, 50, 10)
    assert len(recs) == 10
    assert Z.count_zeros_rectangle(0.5, 50.0) == 10


def test_records_match_mpmath_zetazero(first_zeros):
    for r in first_zeros:
        ref = float(mpmath.zetazero(r.index).imag)
        assert abs(r.gamma - ref) < 1e-12 * ref
        assert abs(special.eval_zeta(r.alpha).value) < 1e-8


def test_argument_count_matches_records():
    for lo, hi in [(10, 40), (100, 130), (230, 240)]:
        recs = Z.find_zeros(lo, hi, 8)
        assert Z.count_zeros_rectangle(lo, hi) == len(recs)


def test_missed_zero_is_surfaced(monkeypatch):
    real = Z._brackets

    def drop_one(lo, hi, step):
        return real(lo, hi, step)[1:]

    monkeypatch.setattr(Z, "_brackets", drop_one)
    with pytest.raises(MissedZeroSuspected) as info:
        Z.find_zeros(10, 32, 6)
    assert info.value.expected == 4 and info.value.found == 3


def test_newton_converges_quadratically():
    g1 = float(mpmath.zetazero(1).imag)
    rec = ZeroRecord(1, g1 + 1e-3, 3, 1.0)
    out = Z.refine_to_digits(rec, 50)
    hist = [h for h in out.newton_residuals if h > 1e-45]
    assert len(hist) >= 3
    for a, b in zip(hist[-3:], hist[-2:]):
        # |zeta'| at the first zero is below 1, so r_{k+1} <= C r_k^2 with C ~ 1
        assert b <= 10 * a * a
    with mpmath.workdps(60):
        assert abs(out.gamma - mpmath.zetazero(1).imag) < mpmath.mpf(10) ** -49


def test_extended_zeros_match_mpmath():
    recs = Z.find_zeros(10, 26, 40)
    with mpmath.workdps(50):
        for r in recs:
            assert r.precision_digits == 40
            assert abs(r.gamma - mpmath.zetazero(r.index).imag) < mpmath.mpf(10) ** -40
            assert r.residual < 1e-38


def test_round_trip(tmp_path):
    recs = Z.find_zeros(10, 32, 6) + Z.find_zeros(32, 38, 30)
    p = tmp_path / "z.csv"
    Z.store_zeros(recs, p)
    back = Z.load_zeros(p)
    assert back == recs
    text = p.read_bytes()
    assert b"\r" not in text
    assert text.startswith(b"index,gamma,precision_digits,residual,method\n")


def test_header_only_and_bad_files(tmp_path):
    assert Z.loads_zeros("index,gamma,precision_digits,residual,method\n") == []
    bad = ("index,gamma,precision_digits,residual,method\n"
           "1,21.0,6,1e-12,sign-bracket+refine\n"
           "2,14.1,6,1e-12,sign-bracket+refine\n")
    with pytest.raises(FormatError) as info:
        Z.loads_zeros(bad)
    assert info.value.line == 3
    with pytest.raises(FormatError):
        Z.loads_zeros("gamma,index\n")
    with pytest.raises(FormatError) as info:
        Z.loads_zeros("index,gamma,precision_digits,residual,method\n1,abc,6,0,imported\n")
    assert "line 2" in str(info.value)
    with pytest.raises(ValueError):
        Z.store_zeros(list(reversed(Z.find_zeros(10, 22, 6))), tmp_path / "x.csv")


def test_invalid_ranges():
    with pytest.raises(ValueError):
        Z.find_zeros(20, 10, 6)
    with pytest.raises(ValueError):
        Z.find_zeros(0, 1e4, 6)


def test_zeros_up_to_index_100():
    recs = Z.zeros_up_to_index(100, 10)
    assert len(recs) == 100 and recs[-1].index == 100
    assert abs(recs[-1].gamma - 236.524229665816) < 1e-9
    gam = [r.gamma for r in recs]
    assert all(b > a for a, b in zip(gam, gam[1:]))

import math

import pytest

from sturm_delay import find_eigen_near, scan_spectrum, simplicity_check
from sturm_delay.characteristic import H_norm
from sturm_delay.spectrum import NoRootInWindow

from conftest import COS, LINEAR_RETARD, ONE, ZERO, free, free_root, make


@pytest.mark.parametrize("N", [1, 2, 3, 7])
def test_free_roots_match_oracle(N):
    rec = find_eigen_near(free(), N)
    assert rec.window_hits == 1
    assert rec.mu_num == pytest.approx(free_root(N), abs=1e-8)
    assert rec.eigenvalue == pytest.approx(rec.mu_num ** 2)


def test_first_free_root_is_one():
    assert find_eigen_near(free(), 1).mu_num == pytest.approx(1.0, abs=1e-9)


def test_record_fields():
    rec = find_eigen_near(free(), 2)
    assert rec.mu_lead == 2.25
    assert rec.err_lead == pytest.approx(abs(rec.mu_num - 2.25))
    assert rec.scaled_lead == pytest.approx(2 * rec.err_lead)
    assert rec.scaled_asym == pytest.approx(4 * rec.err_asym)
    assert rec.err_asym <= 7e-4
    assert rec.residual <= 1e-8
    assert not rec.advisory
    assert rec.accepted


def test_jump_factors_leave_roots_unchanged():
    a = find_eigen_near(make(COS, LINEAR_RETARD), 5).mu_num
    b = find_eigen_near(make(COS, LINEAR_RETARD, 2.0, -0.5), 5).mu_num
    assert a == pytest.approx(b, abs=1e-9)


def test_scan_free_range():
    scan = scan_spectrum(free(), 0.5, 3.6)
    assert len(scan.roots) == 3
    for N, r in enumerate(scan.roots, start=1):
        assert r == pytest.approx(free_root(N), abs=1e-8)


def test_scan_empty_and_degenerate():
    assert scan_spectrum(free(), 0.5, 0.9).roots == ()
    assert scan_spectrum(free(), 2.0, 2.0).roots == ()
    with pytest.raises(ValueError):
        scan_spectrum(free(), 0.0, 1.0)


def test_simplicity():
    assert simplicity_check(free(), 1.0).status == "SIMPLE"
    assert simplicity_check(free(), 1.5).status == "NOT_A_ROOT"
    r = find_eigen_near(make(ONE, LINEAR_RETARD), 6).mu_num
    rep = simplicity_check(make(ONE, LINEAR_RETARD), r)
    assert rep.simple and rep.sign_change


def test_no_root_in_window(monkeypatch):
    # a real problem always has the root, so stub out the characteristic function
    import sturm_delay.spectrum as sp
    monkeypatch.setattr(sp, "H_norm", lambda spec, m: 1.0 + 0.0 * m)
    with pytest.raises(NoRootInWindow) as exc:
        sp.find_eigen_near(free(), 4)
    assert exc.value.N == 4
    assert exc.value.nearest is None


def test_several_roots_in_window_reported(monkeypatch):
    import sturm_delay.spectrum as sp
    monkeypatch.setattr(sp, "H_norm", lambda spec, m: math.sin(40 * (m - 4.0)))
    rec = sp.find_eigen_near(free(), 4)
    assert rec.window_hits > 1
    assert not rec.accepted
    assert len(rec.candidates) == rec.window_hits


def test_invalid_N():
    with pytest.raises(ValueError):
        find_eigen_near(free(), 0)


def test_h_norm_changes_sign_at_reported_root():
    spec = make(COS, ZERO, 2.0, 3.0)
    r = find_eigen_near(spec, 9).mu_num
    assert H_norm(spec, r - 1e-6) * H_norm(spec, r + 1e-6) < 0

import pytest

from levitrap.regression import (CASES, RegressionRow, case_rows, discrepancy_report,
                                 normalize_case, run_case, run_regression)


@pytest.fixture(scope="module")
def regression():
    return run_regression("all")


def test_tier1_passes(regression):
    rows, _, ok = regression
    assert ok
    assert all(r.passed for r in rows if r.tolerance_class == "tier1")


def test_each_quantity_once_per_case(regression):
    rows, _, _ = regression
    keys = [(r.case, r.quantity) for r in rows]
    assert len(keys) == len(set(keys))
    assert all(r.note for r in rows)


def test_tier2_within_factor(regression):
    rows, _, _ = regression
    assert all(r.passed for r in rows if r.tolerance_class == "tier2")


def test_claims_hold(regression):
    rows, _, _ = regression
    claims = [r for r in rows if r.tolerance_class == "claim"]
    assert len(claims) == 7
    assert all(r.passed for r in claims)


def test_discrepancy_factors_reconstruct(regression):
    _, disc, _ = regression
    assert len(disc) == 4
    for d in disc:
        assert d.heating_factor > 1
        assert 0.5 < d.noise_factor < 2


def test_discrepancy_definition():
    cr = run_case("70nm")
    rows = {r.quantity: r for r in case_rows(cr)}
    d = discrepancy_report(cr)[1]
    opt, mmin = rows["Gamma_fb_opt_k3"], rows["m_min_k3"]
    assert d.heating_factor * d.noise_factor == pytest.approx(mmin.ratio**2, rel=1e-12)
    assert d.heating_factor / d.noise_factor == pytest.approx(opt.ratio**2, rel=1e-12)


def test_case_names():
    assert normalize_case("all") == list(CASES)
    assert normalize_case("X-180nm") == ["180nm"]
    with pytest.raises(KeyError):
        normalize_case("1nm")


def test_row_verdicts():
    assert RegressionRow("c", "q", 1.05, 1.0, "1", "tier1", 0.1, "n").verdict == "pass"
    assert RegressionRow("c", "q", 1.2, 1.0, "1", "tier1", 0.1, "n").verdict == "FAIL"
    assert RegressionRow("c", "q", 30.0, 1.0, "1", "report", 20, "n").verdict == "info-off"

import math

import numpy as np
import pytest

from gibbs_spectral.errors import ConvergenceError
from gibbs_spectral.gibbs import GibbsSpec
from gibbs_spectral.regimes import (PotentialParams, check_delta_contraction,
                                    delta_c, h_sup, h_sup_grid,
                                    hc_potential_chi, hc_potential_params,
                                    hc_potential_psi,
                                    ising_uniqueness_interval, lambda_c,
                                    si_bound_rhs, verify_potential_contraction)


def test_lambda_c_values():
    assert lambda_c(2) == pytest.approx(4.0, abs=1e-12)
    assert lambda_c(3) == pytest.approx(27 / 16, abs=1e-12)
    with pytest.raises(ValueError):
        lambda_c(1.0)


def test_lambda_c_strictly_decreasing():
    grid = np.arange(2.0, 10.01, 0.1)
    values = [lambda_c(z) for z in grid]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_delta_c_values():
    assert delta_c(4.0) == pytest.approx(2.0, abs=1e-10)
    assert delta_c(27 / 16) == pytest.approx(3.0, abs=1e-10)
    for z in (2.0, 2.5, 5.0):
        assert delta_c(lambda_c(z)) == pytest.approx(z, abs=1e-9)
    assert lambda_c(delta_c(1.3)) == pytest.approx(1.3, abs=1e-10)
    with pytest.raises(ConvergenceError):
        delta_c(1e-9)


def test_ising_interval():
    lo, hi = ising_uniqueness_interval(2.0, 1e-9)
    assert lo == pytest.approx(1 / 3, abs=1e-8)
    assert hi == pytest.approx(3.0, abs=1e-7)
    for z, d in ((2.0, 0.3), (4.5, 0.05)):
        lo, hi = ising_uniqueness_interval(z, d)
        assert lo * hi == pytest.approx(1.0, abs=1e-12)
    # Nesting: larger z gives a smaller interval.
    lo1, hi1 = ising_uniqueness_interval(2.0, 0.2)
    lo2, hi2 = ising_uniqueness_interval(3.0, 0.2)
    assert lo1 < lo2 and hi2 < hi1


def test_h_sup_closed_form_vs_grid():
    specs = [GibbsSpec.ising(b, 1.0) for b in (0.2, 0.5, 0.9, 1.0, 1.5, 3.0)]
    specs += [GibbsSpec.hardcore(0.5), GibbsSpec(beta=0.3, gamma=2.0, lam=1.0)]
    for spec in specs:
        closed = h_sup(spec)
        grid = h_sup_grid(spec)
        assert grid <= closed + 1e-12
        assert closed <= grid + 1e-4  # the grid gets within refinement error


def test_ising_h_sup_formula():
    for beta in (0.2, 0.5, 0.9, 1.5, 3.0):
        assert h_sup(GibbsSpec.ising(beta, 0.7)) == pytest.approx(
            abs(1 - beta) / (1 + beta), abs=1e-12)


def test_ising_interval_gives_contraction():
    for rho in (1.5, 2.0, 3.7):
        for eps in (0.2, 0.5):
            lo, hi = ising_uniqueness_interval(rho, eps)
            for beta in (lo, math.sqrt(lo * hi), hi):
                assert h_sup(GibbsSpec.ising(beta, 1.0)) <= (1 - eps) / rho + 1e-12


def test_check_delta_contraction():
    v = check_delta_contraction(GibbsSpec.ising(1.0, 1.0), 4, 0.01)
    assert v.in_regime and v.detail["h_sup"] == 0.0
    beta = 0.5
    boundary = abs(1 - beta) / (1 + beta)
    v2 = check_delta_contraction(GibbsSpec.ising(beta, 1.0), 4, boundary)
    assert v2.in_regime and v2.margin == pytest.approx(0.0, abs=1e-15)
    v3 = check_delta_contraction(GibbsSpec.ising(beta, 1.0), 4, boundary - 1e-6)
    assert not v3.in_regime


def test_potential_chi_psi():
    assert hc_potential_chi(0.0) == pytest.approx(math.sqrt(0.5))
    assert hc_potential_chi(50.0) == pytest.approx(1.0)
    assert hc_potential_chi(-80.0) == pytest.approx(0.0, abs=1e-12)
    assert hc_potential_psi(1.0) == pytest.approx(1 / (2 * math.sqrt(2)))
    with pytest.raises(ValueError):
        hc_potential_psi(0.0)


def test_hc_potential_params_example():
    p = hc_potential_params(4.0)
    assert 1.0 / p.s == pytest.approx(1 - 0.5 * math.log(2), abs=1e-10)
    assert p.delta == pytest.approx(0.5, abs=1e-10)
    assert p.c == pytest.approx(0.8, abs=1e-12)
    for lam in (0.1, 1.0, 10.0):
        assert hc_potential_params(lam).s >= 1.0


def test_potential_params_validation():
    with pytest.raises(ValueError):
        PotentialParams(s=0.5, delta=0.1, c=0.1)


def test_verify_potential_contraction():
    for lam in (0.5, 1.0, 2.0):
        spec = GibbsSpec.hardcore(lam)
        params = hc_potential_params(lam)
        report = verify_potential_contraction(spec, params, d_max=6,
                                              samples=2000, seed=5)
        assert report.max_violation <= 1e-9
        assert report.boundedness_max <= lam / (1 + lam) + 1e-9
        assert report.ok
    with pytest.raises(ValueError):
        verify_potential_contraction(GibbsSpec.ising(0.5, 1.0),
                                     PotentialParams(1.5, 0.5, 0.5))


def test_verify_potential_reproducible():
    spec = GibbsSpec.hardcore(1.0)
    params = hc_potential_params(1.0)
    a = verify_potential_contraction(spec, params, samples=500, seed=9)
    b = verify_potential_contraction(spec, params, samples=500, seed=9)
    assert a.max_violation == b.max_violation


def test_si_bound_rhs():
    assert si_bound_rhs("contraction", epsilon=0.5) == pytest.approx(2.0)
    # s = 1 collapses the potential bound to 1 + zeta/epsilon.
    assert si_bound_rhs("potential", epsilon=0.25, s=1.0, zeta=2.0,
                        max_degree=4, rho=2.0) == pytest.approx(1 + 2.0 / 0.25)
    assert si_bound_rhs("contraction", epsilon=0.9) < si_bound_rhs(
        "contraction", epsilon=0.2)
    with pytest.raises(ValueError):
        si_bound_rhs("contraction", epsilon=1.5)
    with pytest.raises(ValueError):
        si_bound_rhs("nonsense", epsilon=0.5)


def test_delta_c_interpretation():
    # Below (1-eps) lambda_c(R) the certified rate clears (1-z)/R for some z.
    for rho in (2.0, 3.0, 5.0):
        for eps in (0.2, 0.5):
            lam = (1 - eps) * lambda_c(rho)
            params = hc_potential_params(lam)
            assert params.delta < 1.0 / rho
            assert lam / (1 + lam) < math.exp(3) / rho

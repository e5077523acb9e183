import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qverify.errors import (
    DegenerateStrategyError,
    ThetaOutOfDomainError,
    ValidationError,
)
from qverify.adversary import (
    HULL_COLUMNS,
    LANDSCAPE_COLUMNS,
    AdversaryKind,
    acceptance_probability,
    certify_optimality,
    family_omega,
    family_qmax,
    family_trace3,
    hilbert_schmidt_mixed_state,
    hull_boundary,
    lambda1,
    lambda2,
    landscape,
    ppt_lower_bound,
    ridge_alpha,
    ridge_q,
    shift_fidelity,
    strategy_game_value,
    tau_state,
    top_orthogonal_eigenvector,
    trace3_orthogonal_top,
    twirl_average,
    worst_case_state,
)
from qverify.qcore import HermitianOperator, Ket, identity
from qverify.strategy import (
    MeasurementSetting,
    Locality,
    Strategy,
    StrategyKind,
    alpha_weight,
    bell_strategy,
    metrics,
    optimal_q,
    target_state,
    two_qubit_optimal,
)

CERT_THETAS = [math.pi / 12, math.pi / 8, math.pi / 5, 3 * math.pi / 8]


def test_top_orthogonal_eigenvector_bell():
    value, state = top_orthogonal_eigenvector(bell_strategy())
    assert abs(value - 1.0 / 3.0) < 1e-12
    bell = Ket.normalized([1.0, 0.0, 0.0, 1.0])
    assert abs(state.inner(bell)) < 1e-10


def test_worst_case_state_acceptance():
    strat = bell_strategy()
    for eps in (0.01, 0.1, 0.5):
        adv = worst_case_state(strat, eps)
        assert adv.kind is AdversaryKind.WORST_CASE_PURE
        assert abs(adv.fidelity - (1.0 - eps)) < 1e-12
        accept = acceptance_probability(strat.omega, adv)
        assert abs(accept - (1.0 - eps * (1.0 - 1.0 / 3.0))) < 1e-12


def test_worst_case_state_validation():
    with pytest.raises(ValidationError):
        worst_case_state(bell_strategy(), 0.0)
    lazy = Strategy(
        target=Ket.normalized([1.0, 0.0, 0.0, 1.0]),
        settings=(
            MeasurementSetting(
                projector=identity(4),
                weight=1.0,
                label="I",
                locality=Locality.NONLOCAL,
            ),
        ),
        kind=StrategyKind.CUSTOM,
    )
    with pytest.raises(DegenerateStrategyError):
        worst_case_state(lazy, 0.1)


def test_hilbert_schmidt_states_are_densities():
    rng = np.random.default_rng(11)
    for _ in range(25):
        rho = hilbert_schmidt_mixed_state(4, rng)
        assert abs(float(np.trace(rho).real) - 1.0) < 1e-12
        assert np.linalg.eigvalsh(rho)[0] > -1e-12


def test_shift_fidelity_exact():
    rng = np.random.default_rng(3)
    target = target_state(0.6)
    for eps in (0.05, 0.3, 0.8):
        rho = hilbert_schmidt_mixed_state(4, rng)
        adv = shift_fidelity(rho, target, eps)
        achieved = float(
            np.real(
                np.vdot(target.amplitudes, adv.sigma.entries @ target.amplitudes)
            )
        )
        assert abs(achieved - (1.0 - eps)) < 1e-12
        assert abs(adv.fidelity - (1.0 - eps)) < 1e-12


@given(
    phi=st.floats(min_value=0.05, max_value=math.pi / 2 - 0.05),
    eta=st.floats(min_value=0.0, max_value=2.0 * math.pi),
    theta=st.floats(min_value=0.05, max_value=math.pi / 2 - 0.05),
)
@settings(max_examples=50, deadline=None)
def test_tau_states_annihilate_target(phi, eta, theta):
    tau = tau_state(theta, phi, eta)
    psi = target_state(theta)
    assert abs(tau.inner(psi)) < 1e-12
    mat = tau.amplitudes.reshape(2, 2)
    assert np.linalg.svd(mat, compute_uv=False)[1] < 1e-12


def test_twirl_average_survivors():
    rng = np.random.default_rng(5)
    raw = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    sym = twirl_average(raw)
    surviving = {(0, 0), (0, 3), (3, 0), (3, 3), (1, 1), (2, 2)}
    for i in range(4):
        for j in range(4):
            if (i, j) not in surviving:
                assert sym[i, j] == 0.0
    assert np.max(np.abs(sym.imag)) == 0.0
    assert sym[1, 1] == sym[2, 2]
    assert sym[0, 3] == sym[3, 0]


def test_twirl_is_idempotent_projection():
    rng = np.random.default_rng(6)
    raw = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    once = twirl_average(raw)
    assert np.max(np.abs(twirl_average(once) - once)) < 1e-14


def test_family_trace3_fixes_target_and_has_trace_three():
    theta, phi = 0.5, 0.8
    part = family_trace3(theta, phi)
    psi = target_state(theta).amplitudes
    assert np.max(np.abs(part @ psi - psi)) < 1e-12
    assert abs(float(np.trace(part).real) - 3.0) < 1e-12
    assert np.max(np.abs(part - twirl_average(part))) < 1e-12


@given(
    alpha=st.floats(min_value=0.0, max_value=1.0),
    phi=st.floats(min_value=0.1, max_value=math.pi / 2 - 0.1),
    theta=st.floats(min_value=0.1, max_value=math.pi / 2 - 0.1),
)
@settings(max_examples=50, deadline=None)
def test_lambda_formulas_match_dense_eigenvalues(alpha, phi, theta):
    omega = family_omega(theta, alpha, phi)
    psi = target_state(theta).amplitudes
    basis = np.linalg.qr(
        np.column_stack([psi, np.eye(4, dtype=complex)[:, :3]])
    )[0][:, 1:]
    block = basis.conj().T @ omega @ basis
    vals = np.linalg.eigvalsh(block)
    big_p = math.tan(phi) ** 2
    big_t = math.tan(theta) ** 2
    l1 = lambda1(alpha, big_p, big_t)
    l2 = lambda2(alpha, big_p, big_t)
    assert abs(max(vals) - max(l1, l2)) < 1e-9
    assert abs(family_qmax(alpha, big_p, big_t) - max(vals)) < 1e-9


def test_ridge_alpha_equalizes_eigenvalues():
    big_t = math.tan(0.5) ** 2
    big_p = math.sqrt(big_t)
    alpha = ridge_alpha(big_p, big_t)
    assert alpha is not None
    l1 = lambda1(alpha, big_p, big_t)
    l2 = lambda2(alpha, big_p, big_t)
    assert abs(l1 - l2) < 1e-12
    assert abs(ridge_q(big_p, big_t) - l1) < 1e-12


def test_ridge_minimum_matches_closed_form():
    for theta in CERT_THETAS:
        big_t = math.tan(theta) ** 2
        big_p = math.sqrt(big_t)
        assert abs(ridge_q(big_p, big_t) - optimal_q(theta)) < 1e-12


def test_ppt_bound_equals_trace3_orthogonal_top():
    for theta in CERT_THETAS:
        assert abs(ppt_lower_bound(theta) - trace3_orthogonal_top(theta)) < 1e-10


def test_ppt_bound_frozen_value():
    assert abs(ppt_lower_bound(math.pi / 8.0) - 0.41421356237309503) < 1e-15


def test_hull_boundary_structure():
    rows = hull_boundary(math.pi / 8.0, points=50)
    assert len(rows) == 52
    parts = {part for _, _, part in rows}
    assert parts == {"ppt-cutoff", "zz-point", "trace3-locus"}
    floor = ppt_lower_bound(math.pi / 8.0)
    for lam1, lam2, part in rows:
        if part == "trace3-locus":
            assert lam1 >= floor - 1e-12
            assert abs(lam2 - (1.0 - lam1 / 2.0)) < 1e-12
        elif part == "zz-point":
            assert (lam1, lam2) == (1.0, 0.0)
    assert len(HULL_COLUMNS) == 3


def test_hull_boundary_validation():
    with pytest.raises(ThetaOutOfDomainError):
        hull_boundary(0.0)
    with pytest.raises(ValidationError):
        hull_boundary(0.5, points=1)


def test_landscape_report_contains_ridge_and_argmin():
    report = landscape(0.5, alphas=np.linspace(0.0, 1.0, 21),
                       phis=np.linspace(0.1, 1.4, 19))
    assert len(report.rows) == 21 * 19
    assert report.min_qmax <= min(r.qmax for r in report.rows) + 1e-15
    assert len(LANDSCAPE_COLUMNS) == 5
    assert report.min_qmax >= optimal_q(0.5) - 1e-12
    for phi, alpha_star, q_here in report.ridge:
        assert 0.0 <= alpha_star <= 1.0
        assert q_here >= optimal_q(0.5) - 1e-12


@pytest.mark.parametrize("theta", CERT_THETAS)
def test_certification_quick(theta):
    # coarse pass only: soundness plus a loose location check; the
    # acceptance suite runs the full resolution
    cert = certify_optimality(
        theta, resolution=120, refine_resolution=600,
        value_tol=1e-4, location_tol=5e-3,
    )
    assert cert.sound
    assert cert.passed
    assert cert.gap >= -1e-9
    assert abs(cert.q_polished - optimal_q(theta)) < 1e-9
    assert abs(cert.alpha_polished - alpha_weight(theta)) < 1e-6
    assert abs(cert.phi_polished - math.atan(math.sqrt(math.tan(theta)))) < 1e-6


def test_certificate_reports_ppt_floor():
    cert = certify_optimality(
        math.pi / 8, resolution=80, refine_resolution=320,
        value_tol=1e-3, location_tol=1e-2,
    )
    assert abs(cert.ppt_bound - ppt_lower_bound(math.pi / 8)) < 1e-15
    assert cert.resolution == 80


def test_game_value_bell_frozen():
    result = strategy_game_value(bell_strategy(), 0.01)
    assert abs(result.accept_prob - 0.9933333333333331) < 1e-12
    assert abs(result.epsilon_star - 0.01) < 1e-12
    assert result.maximizer.fidelity <= 0.99 + 1e-10


@pytest.mark.parametrize(
    "build,theta",
    [(bell_strategy, None), (two_qubit_optimal, math.pi / 8), (two_qubit_optimal, 0.7)],
)
def test_game_value_matches_worst_case_formula(build, theta):
    strat = build() if theta is None else build(theta)
    eps = 0.1
    q = metrics(strat).q
    result = strategy_game_value(strat, eps)
    assert abs(result.accept_prob - (1.0 - eps * (1.0 - q))) < 1e-8
    assert abs(result.epsilon_star - eps) < 1e-5
    accept = acceptance_probability(strat.omega, result.maximizer)
    assert accept <= result.accept_prob + 1e-10


def test_game_value_epsilon_validation():
    with pytest.raises(ValidationError):
        strategy_game_value(bell_strategy(), 0.0)
    with pytest.raises(ValidationError):
        strategy_game_value(bell_strategy(), 1.0)


def test_mixed_states_never_beat_pure_worst_case():
    # spot version of the acceptance sweep: 100 random mixed states at
    # fixed fidelity stay below the pure worst case bound
    strat = two_qubit_optimal(0.6)
    q = metrics(strat).q
    eps = 0.1
    bound = 1.0 - eps * (1.0 - q)
    rng = np.random.default_rng(123)
    for _ in range(100):
        rho = hilbert_schmidt_mixed_state(4, rng)
        adv = shift_fidelity(rho, strat.target, eps)
        assert acceptance_probability(strat.omega, adv) <= bound + 1e-10

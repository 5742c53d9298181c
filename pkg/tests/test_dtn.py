import numpy as np
import pytest

from rotstokes import dtn as D, fields as F, halfspace as H
from rotstokes.util import loglog_slope


def random_cases(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        xi = rng.standard_normal(2) * 10 ** rng.uniform(-2, 2)
        v0 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        yield xi, v0


def traction_from_solution(xi, v0):
    # -d3 u + p e3 at the wall from the closed-form mode expansion, assembled
    # without the symbol's precomputed weights or traction columns: LAPACK
    # solve of the 3x3 mode system, then per-mode analytic differentiation
    sys_ = H.mode_matrix(xi)
    amps = np.linalg.solve(sys_.matrix, sys_.rhs_map @ np.asarray(v0, dtype=complex))
    lam = np.array(sys_.roots.lambdas())
    out = (sys_.vel_cols * lam[None, :]) @ amps
    out[2] += sys_.pressure_factors @ amps
    return out


def test_symbol_matches_solution_traction():
    worst = 0.0
    for xi, v0 in random_cases(1000, seed=7):
        t_sym = D.dtn_symbol(xi) @ v0
        t_sol = traction_from_solution(xi, v0)
        scale = max(float(np.max(np.abs(t_sol))), 1e-300)
        worst = max(worst, float(np.max(np.abs(t_sym - t_sol))) / scale)
    assert worst <= 1e-10, worst


def test_symbol_matches_finite_difference_traction():
    # secondary check with a 6th-order one-sided stencil; step balances
    # truncation (h lam)^6 against rounding eps/h, which floors the error
    # near 1e-10..1e-9, well above the analytic-path comparison
    c6 = np.array([-49 / 20, 6, -15 / 2, 20 / 3, -15 / 4, 6 / 5, -1 / 6])
    worst = 0.0
    for xi, v0 in random_cases(200, seed=3):
        sys_ = H.mode_matrix(xi)
        co = H.solve_coefficients(sys_, v0)
        lmax = max(r.real for r in sys_.roots.lambdas())
        h = 8.6e-3 / max(1.0, lmax)
        du = sum(c6[j] * H.evaluate_velocity(sys_, co, j * h) for j in range(7)) / h
        t_fd = -du
        t_fd[2] += H.evaluate_pressure(sys_, co, 0.0)
        t_sym = D.dtn_symbol(xi) @ v0
        scale = max(float(np.max(np.abs(t_sym))), 1e-300)
        worst = max(worst, float(np.max(np.abs(t_sym - t_fd))) / scale)
    assert worst <= 1e-8, worst


def test_hermitian_part_positive_semidefinite():
    angles = np.linspace(0.0, np.pi, 7)[:-1] + 0.13
    floor = np.inf
    for s in np.logspace(-3, 3, 121):
        for a in angles:
            xi = s * np.array([np.cos(a), np.sin(a)])
            floor = min(floor, D.hermitian_minimum_eigenvalue(xi))
    assert floor >= -1e-10, floor
    # in fact strictly accretive: the normalized minimum stays a few 1e-4
    assert floor > 1e-5, floor


def test_decomposition_recomposes():
    worst = 0.0
    for s in np.logspace(-3, 3, 121):
        for a in (0.3, 1.7, 2.6):
            xi = s * np.array([np.cos(a), np.sin(a)])
            parts = D.dtn_decompose(xi)
            err = np.max(np.abs(parts.recompose() - parts.full))
            worst = max(worst, err / np.max(np.abs(parts.full)))
    assert worst <= 1e-12, worst


def test_order_one_part_displays():
    xi = np.array([0.31, -0.22])
    parts = D.dtn_decompose(xi)
    s = parts.modulus
    assert np.allclose(parts.m1(), s * D.M1_COEF, rtol=0, atol=1e-15)
    assert np.allclose(parts.order_one[:2, :2], parts.m1())
    assert np.allclose(parts.order_one[:2, 2], parts.v1())
    assert np.allclose(parts.order_one[2, :2], parts.v2())
    assert parts.order_one[2, 2] == pytest.approx(1.0 / s)
    # the potential-composed blocks are real matrices
    for blk in (parts.m2(), parts.m3(), parts.m4()):
        assert np.max(np.abs(blk.imag)) <= 1e-15
    assert np.allclose(parts.m4(), np.outer(xi, xi) / s)


def test_lowfreq_remainder_orders():
    ss = np.logspace(-3, -1, 13)
    horiz, vcol, corner = [], [], []
    for s in ss:
        xi = s * np.array([np.cos(0.4), np.sin(0.4)])
        parts = D.dtn_decompose(xi)
        rem = parts.lowfreq_rem
        horiz.append(np.max(np.abs(rem[:2, :2])))
        vcol.append(max(np.max(np.abs(rem[:2, 2])), np.max(np.abs(rem[2, :2]))))
        corner.append(abs(rem[2, 2]))
    assert loglog_slope(ss, horiz) >= 1.8
    assert loglog_slope(ss, vcol) >= 0.8
    # the 3,3 remainder tends to a finite constant (about sqrt2/2)
    assert 0.5 <= corner[0] <= 1.0
    assert abs(corner[0] - corner[2]) <= 0.05


def test_highfreq_difference_decays():
    ss = np.logspace(1, 3, 13)
    diff = []
    for s in ss:
        xi = s * np.array([np.cos(1.1), np.sin(1.1)])
        parts = D.dtn_decompose(xi)
        assert parts.phi == 0.0
        diff.append(np.max(np.abs(parts.highfreq_rem)))
    # growth exponent must stay below 0.4; measured decay is ~ -1
    assert loglog_slope(ss, diff) <= 0.4


def test_asymptotic_forms():
    ss = np.logspace(-4, -2, 7)
    errs = []
    for s in ss:
        xi = s * np.array([np.cos(0.8), np.sin(0.8)])
        errs.append(np.max(np.abs(D.dtn_symbol(xi) - D.dtn_asymptotic(xi, "low"))))
    assert errs[0] <= 1e-3
    assert loglog_slope(ss, errs) >= 0.9
    xi_hi = np.array([600.0, 450.0])
    m_hi = D.dtn_symbol(xi_hi)
    err_hi = np.max(np.abs(m_hi - D.dtn_asymptotic(xi_hi, "high")))
    assert err_hi / np.max(np.abs(m_hi)) <= 1e-5
    with pytest.raises(ValueError):
        D.dtn_asymptotic(np.array([0.0, 0.0]), "low")
    with pytest.raises(ValueError):
        D.dtn_asymptotic(np.array([1.0, 0.0]), "sideways")


def test_remainder_derivative_decay():
    ss = np.logspace(1, 2.5, 9)
    d1 = [D.dtn_remainder_derivatives([s, 0.4 * s], 1) for s in ss]
    d3 = [D.dtn_remainder_derivatives([s, 0.4 * s], 3) for s in ss]
    assert loglog_slope(ss, d1) <= -0.5
    assert loglog_slope(ss, d3) <= -2.5
    with pytest.raises(ValueError):
        D.dtn_remainder_derivatives([1.0, 0.0], 4)


def test_cutoff_profile():
    assert D.cutoff_phi(0.0) == 1.0
    assert D.cutoff_phi(1.0) == 1.0
    assert D.cutoff_phi(2.0) == 0.0
    assert D.cutoff_phi(5.0) == 0.0
    assert D.cutoff_phi(1.5) == pytest.approx(np.exp(1.0 - 1.0 / (1.0 - 0.25)))
    mid = D.cutoff_phi(np.linspace(1.001, 1.999, 400))
    assert np.all(np.diff(mid) < 0.0)
    # C^1 at the inner edge: one-sided slope vanishes there
    h = 1e-6
    assert abs(D.cutoff_phi(1.0 + h) - 1.0) / h <= 1e-4


def test_zero_frequency_symbol():
    m0 = D.dtn_symbol(np.array([0.0, 0.0]))
    assert np.allclose(m0[:2, :2], D.MBAR_H)
    assert np.max(np.abs(m0[2, :])) == 0.0
    assert np.max(np.abs(m0[:, 2])) == 0.0
    with pytest.raises(ValueError):
        D.dtn_decompose(np.array([0.0, 0.0]))
    with pytest.raises(ValueError):
        D.dtn_symbol_stokes(np.array([0.0, 0.0]))


def test_apply_matches_halfspace_traction():
    trace = F.BoundaryTrace.random(n=16, period=2 * np.pi, seed=21)
    t_sym = D.dtn_apply(trace)
    t_ref = F.values_of(H.HalfspaceSolution(trace).traction_spectrum())
    scale = np.max(np.abs(t_ref))
    assert np.max(np.abs(t_sym - t_ref)) / scale <= 1e-10


def test_quadratic_form_is_dirichlet_energy():
    worst = 0.0
    rng = np.random.default_rng(31)
    for _ in range(20):
        n = int(rng.choice([8, 12, 16]))
        trace = F.BoundaryTrace.random(
            n=n, period=float(rng.uniform(2.0, 9.0)), seed=int(rng.integers(1 << 30))
        )
        q = D.quadratic_form(trace)
        e = D.total_energy_reference(trace)
        worst = max(worst, abs(q - e) / max(abs(e), 1e-300))
    assert worst <= 1e-8, worst


def test_apply_rejects_raw_arrays():
    with pytest.raises(TypeError):
        D.dtn_apply(np.zeros((3, 8, 8)))
    with pytest.raises(TypeError):
        D.quadratic_form(np.zeros((3, 8, 8)))

import numpy as np
import pytest

from rotstokes import dtn as D, kernels as K

# small torus for unit-level checks; the acceptance suite reruns the decay
# fits at full size (period 400, n = 2048 and doubled)
PERIOD = 100.0
N = 512


def test_torus_radii_wraparound():
    rr = K.torus_radii(8, 8.0)
    assert rr[0, 0] == 0.0
    assert rr[1, 0] == 1.0
    assert rr[7, 0] == 1.0
    assert rr[4, 4] == pytest.approx(np.sqrt(32.0))


def test_smooth_rolloff_profile():
    assert K.smooth_rolloff(0.5, 1.0, 2.0) == 1.0
    assert K.smooth_rolloff(2.5, 1.0, 2.0) == 0.0
    assert K.smooth_rolloff(1.5, 1.0, 2.0) == pytest.approx(0.5)
    s = np.linspace(1.0, 2.0, 101)
    w = K.smooth_rolloff(s, 1.0, 2.0)
    assert np.all(np.diff(w) <= 0.0)


def test_kernel_from_symbol_gaussian():
    # symbol e^{-|xi|^2/2} has kernel e^{-r^2/2} / (2 pi)
    n, period = 128, 40.0
    from rotstokes.fields import freq_lattice

    kx, ky = freq_lattice(n, period)
    grid = np.exp(-0.5 * (kx**2 + ky**2)).astype(complex)
    kern = K.kernel_from_symbol(grid, period)
    rr = K.torus_radii(n, period)
    want = np.exp(-0.5 * rr**2) / (2.0 * np.pi)
    assert np.max(np.abs(kern - want)) <= 1e-10


def test_envelope_and_exponent_on_synthetic_kernel():
    rr = K.torus_radii(N, PERIOD)
    vals = np.zeros_like(rr)
    mask = rr > 0
    vals[mask] = rr[mask] ** -3.0
    centers, env = K.radial_envelope(vals, PERIOD, rmin=2.0, rmax=25.0)
    assert centers.shape == env.shape == (K.FIT_BINS,)
    slope = K.decay_exponent(centers, env)
    assert slope == pytest.approx(-3.0, abs=0.05)


def test_lowfreq_expansion_reconstructs_entries():
    worst = 0.0
    for k in range(3):
        for i in range(3):
            for j in range(2):
                for fn in (K._entry_fn_solution(k, i, j), K._entry_fn_potential(k, i, j)):
                    _, resid = K.lowfreq_expansion(fn)
                    worst = max(worst, resid)
    assert worst <= 1e-6, worst


def test_mode_sums_reconstruct_identity():
    # sum_k L_k is exactly the boundary-recovery identity, so the summed
    # low-frequency parts must reproduce the identity columns
    xi = np.array([[1e-5, 0.7e-5]])
    for i in range(3):
        for j in range(2):
            acc = 0.0 + 0.0j
            for k in range(3):
                co, _ = K.lowfreq_expansion(K._entry_fn_solution(k, i, j))
                acc += K.expansion_eval(co, (-1, 0, 1), xi)[0]
            want = 1.0 if i == j else 0.0
            assert abs(acc - want) <= 1e-4


def test_psi_family_vanishes_at_wall():
    # at x3 = 0 the mode sum telescopes to the identity minus its own
    # expansion: the kernels are zero to rounding
    for which in (1, 2):
        fam = K.psi_family(N // 2, PERIOD, which, x3=0.0)
        assert max(np.max(np.abs(k)) for k in fam) <= 1e-9


def test_psi_family_decay_smoke():
    for which in (1, 2):
        fam = K.psi_family(N, PERIOD, which, x3=0.5)
        assert len(fam) == 6
        slope, (r, env) = K.family_envelope(fam, PERIOD, rmin=2.0, rmax=25.0)
        assert env[0] > 1e-4
        assert slope <= -2.2, (which, slope)


def test_lowfreq_remainder_decay_smoke():
    rems = K.lowfreq_remainder_families(N, PERIOD)
    assert [len(rems[b]) for b in (1, 2, 3, 4)] == [4, 2, 2, 1]
    for b in (1, 2, 3, 4):
        slope, (r, env) = K.family_envelope(rems[b], PERIOD, rmin=2.0, rmax=25.0)
        assert env[0] > 1e-4
        assert slope <= -2.2, (b, slope)


def test_highfreq_rows_match_direct_symbol():
    n, period = 64, 20.0
    from rotstokes.fields import freq_lattice

    rows = {i: kerns for i, kerns in K.highfreq_rows(n, period)}
    kx, ky = freq_lattice(n, period)
    nyq = np.pi * n / period
    rng = np.random.default_rng(3)
    for _ in range(20):
        a, b = int(rng.integers(n)), int(rng.integers(n))
        xi = np.array([kx[a, b], ky[a, b]])
        s = float(np.hypot(*xi))
        if s == 0.0:
            continue
        damp = (1.0 - D.cutoff_phi(s)) * K.smooth_rolloff(s, 0.4 * nyq, 0.9 * nyq)
        want = damp * (D.dtn_symbol(xi) - D.dtn_symbol_stokes(xi) - D.mbar_full())
        for i in range(3):
            for j in range(3):
                got = np.fft.fft2(rows[i][j])[a, b] * period**2 / n**2
                assert abs(got - want[i, j]) <= 1e-10 * max(1.0, abs(want[i, j]))


def test_highfreq_decay_smoke():
    envs = []
    for _, row in K.highfreq_rows(N, PERIOD):
        for kern in row:
            envs.append(K.radial_envelope(kern, PERIOD, rmin=2.0, rmax=25.0)[1])
    centers = K._annulus_bins(N, PERIOD, 2.0, 25.0, 24)[2]
    slope = K.decay_exponent(centers, K.merge_envelopes(envs))
    assert slope <= -2.2, slope


def test_mode_weight_kernels():
    kerns = K.mode_weight_kernels(256, PERIOD, x3=1.0)
    assert len(kerns) == 3
    # slow mode keeps its mass at depth; the oscillatory pair is damped
    assert np.max(np.abs(kerns[0])) > np.max(np.abs(kerns[1]))
    assert np.allclose(kerns[1], kerns[2], atol=1e-12)
    with pytest.raises(ValueError):
        K.psi_family(64, PERIOD, 3)

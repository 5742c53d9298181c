import numpy as np
import pytest

import rotstokes
import rotstokes.util
from rotstokes import Frequency, roots as R
from rotstokes._accel import HAS_NUMBA

# decaying triples computed once with 40-digit polyroots on the sextic,
# rounded to float64: (|xi|, lambda1, Re lambda2, Im lambda2)
FROZEN = [
    (0.001, 9.99999999998499970e-10, 7.07107311516964820e-01, 7.07106250856793128e-01),
    (0.37, 4.93095642285266006e-02, 7.84658912009970955e-01, 6.41525778717328632e-01),
    (1.0, 5.63624162161258546e-01, 1.24807769359149967e+00, 4.65332168807044144e-01),
    (5.0, 4.71061786317064879e+00, 5.14494104966701915e+00, 2.55692649405437011e-01),
    (1000.0, 9.99950000416687544e+02, 1.00002499979168749e+03, 4.33016310331398868e-02),
]

SWEEP = np.logspace(-3, 3, 241)


def test_zero_frequency_is_ekman_exponent():
    r = rotstokes.characteristic_roots(0.0)
    assert r.lambda1 == 0.0
    assert abs(r.lambda2 - np.exp(1j * np.pi / 4)) < 1e-15
    assert abs(r.lambda3 - np.exp(-1j * np.pi / 4)) < 1e-15
    assert abs(r.gap2 + 1j) < 1e-15


def test_frozen_literals():
    for s, l1, re2, im2 in FROZEN:
        r = rotstokes.characteristic_roots(s)
        assert abs(r.lambda1 - l1) <= 1e-14 * l1
        assert abs(r.lambda2 - (re2 + 1j * im2)) <= 1e-14 * abs(r.lambda2)


def test_relation_residuals_over_sweep():
    worst = 0.0
    for s in SWEEP:
        res = rotstokes.validate_root_relations(rotstokes.characteristic_roots(s), s)
        worst = max(worst, res["max"])
    assert worst <= 1e-12, worst


def test_closed_form_matches_oracle():
    for s in SWEEP:
        r = rotstokes.characteristic_roots(s)
        o1, o2, o3 = R.decaying_triple(rotstokes.characteristic_roots_oracle(s))
        for a, b in ((r.lambda1, o1), (r.lambda2, o2), (r.lambda3, o3)):
            assert abs(a - b) <= 1e-9 * abs(b), s


def test_oracle_returns_negation_closed_sextet():
    six = rotstokes.characteristic_roots_oracle(2.7)
    assert len(six) == 6
    for r in six:
        assert min(abs(r + q) for q in six) < 1e-12


def test_batch_matches_scalar():
    s = np.array([1e-3, 0.2, 1.0, 40.0, 1e3])
    l1, l2, l3, g1, g2, g3 = R.roots_batch(s)
    for i, si in enumerate(s):
        r = rotstokes.characteristic_roots(si)
        assert abs(l1[i] - r.lambda1) <= 1e-15 * max(r.lambda1, 1e-300)
        assert abs(l2[i] - r.lambda2) <= 1e-15 * abs(r.lambda2)
        assert abs(g2[i] - r.gap2) <= 1e-15 * abs(r.gap2)


@pytest.mark.skipif(not HAS_NUMBA, reason="numba unavailable")
def test_backends_agree():
    s = np.logspace(-3, 3, 97)
    prev = rotstokes.backend()
    try:
        rotstokes.set_backend("numpy")
        a = R.roots_batch(s)
        rotstokes.set_backend("numba")
        b = R.roots_batch(s)
    finally:
        rotstokes.set_backend(prev)
    for x, y in zip(a, b):
        assert np.max(np.abs(x - y)) <= 1e-13 * np.max(np.abs(y))


def test_high_frequency_expansion_slope():
    s = np.logspace(1.2, 3, 25)
    errs = np.empty((3, s.size))
    for i, si in enumerate(s):
        r = rotstokes.characteristic_roots(si)
        a = rotstokes.roots_asymptotic(si, "high")
        errs[0, i] = abs(r.lambda1 - a.lambda1)
        errs[1, i] = abs(r.lambda2 - a.lambda2)
        errs[2, i] = abs(r.lambda3 - a.lambda3)
    for k in range(3):
        slope = rotstokes.util.loglog_slope(s, errs[k])
        assert -1.8 <= slope <= -1.5, (k, slope)


def test_low_frequency_lambda1_slope():
    s = np.logspace(-2, -0.7, 20)
    err = np.array(
        [abs(rotstokes.characteristic_roots(si).lambda1 - si**3) for si in s]
    )
    slope = rotstokes.util.loglog_slope(s, err)
    assert 6.5 <= slope <= 7.5, slope


def test_low_frequency_lambda2_slope():
    s = np.logspace(-2, -0.7, 20)
    err = np.array(
        [
            abs(
                rotstokes.characteristic_roots(si).lambda2
                - rotstokes.roots_asymptotic(si, "low").lambda2
            )
            for si in s
        ]
    )
    slope = rotstokes.util.loglog_slope(s, err)
    assert 3.5 <= slope <= 4.5, slope


def test_validate_flags_perturbed_roots():
    s = 0.8
    r = rotstokes.characteristic_roots(s)
    bad = R.SpectralRoots.from_lambdas(
        r.lambda1 * (1 + 1e-6), r.lambda2, r.lambda3, s
    )
    res = rotstokes.validate_root_relations(bad, s)
    assert res["product"] > 1e-7
    # conjugate-pair violation shows up in the branch residual
    bad2 = R.SpectralRoots.from_lambdas(r.lambda1, r.lambda2, r.lambda3 * 1.001, s)
    assert rotstokes.validate_root_relations(bad2, s)["branch"] > 1e-4


def test_input_validation():
    with pytest.raises(ValueError):
        rotstokes.characteristic_roots(-1.0)
    with pytest.raises(ValueError):
        rotstokes.characteristic_roots(np.nan)
    with pytest.raises(ValueError):
        rotstokes.roots_asymptotic(1.0, "sideways")
    f = Frequency(3.0, 4.0)
    assert f.modulus == 5.0
    assert f.perp.as_array().tolist() == [-4.0, 3.0]
    g = Frequency.from_polar(2.0, np.pi / 2)
    assert abs(g.xi2 - 2.0) < 1e-15

"""Seeded verification suites mirroring each module's invariants.

Every suite draws its sweep from a generator seeded by the caller, evaluates
the module's exact identities or expansion rates at moderate sizes, and
returns rows (check name, measured value, gate, status). Rows are emitted in
a fixed order and formatted deterministically, so identical seeds produce
byte-identical reports. The acceptance-tolerance versions of these checks,
at full sweep sizes, live in the test suite; the verify gates are the same
identities at desk-scale sizes, with reduced-size decay fits gated at the
looser exponents those sizes support.
"""

import os
from dataclasses import dataclass

import numpy as np

from . import channel as C
from . import dtn as D
from . import halfspace as H
from . import kernels as K
from . import roots as R
from . import singular as S
from .fields import BoundaryTrace
from .util import loglog_slope

__all__ = ["CheckRow", "SUITES", "run_suites", "write_reports"]


@dataclass(frozen=True)
class CheckRow:
    suite: str
    check: str
    value: float
    gate: str
    passed: bool


def _row(suite, check, value, gate, passed):
    return CheckRow(suite, check, float(value), gate, bool(passed))


def _le(suite, check, value, bound):
    return _row(suite, check, value, "<=%g" % bound, value <= bound)


def _in(suite, check, value, lo, hi):
    return _row(suite, check, value, "in[%g,%g]" % (lo, hi), lo <= value <= hi)


def suite_roots(seed):
    rng = np.random.default_rng(seed)
    moduli = 10.0 ** rng.uniform(-3.0, 3.0, size=2000)
    worst = 0.0
    for s in moduli:
        worst = max(worst, R.validate_root_relations(R.characteristic_roots(s), s)["max"])
    rows = [_le("roots", "relations-max", worst, 1e-12)]

    dev = 0.0
    for s in moduli[:400]:
        a = np.array(R.characteristic_roots(s).lambdas())
        b = np.array(R.decaying_triple(R.characteristic_roots_oracle(s)))
        dev = max(dev, float(np.max(np.abs(a - b) / np.abs(b))))
    rows.append(_le("roots", "oracle-agreement", dev, 1e-9))

    det = 0.0
    for s in moduli[:200]:
        sys_ = H.mode_matrix(np.array([s, 0.0]))
        a, b = H.mode_determinant(sys_), H.mode_determinant_factored(sys_)
        det = max(det, abs(a - b) / abs(b))
    rows.append(_le("roots", "determinant-identity", det, 1e-10))
    limit = H.mode_determinant(H.mode_matrix(np.array([1e-6, 0.0])))
    rows.append(_le("roots", "determinant-limit", abs(limit - (-2j)), 1e-5))

    s_hi = np.logspace(1.0, 3.0, 9)
    err_hi = []
    for s in s_hi:
        lam = np.array(R.characteristic_roots(s).lambdas())
        ref = np.array(R.roots_asymptotic(s, "high").lambdas())
        err_hi.append(np.max(np.abs(lam - ref)))
    rows.append(_in("roots", "lambda-high-error-slope", loglog_slope(s_hi, err_hi), -1.8, -1.5))

    s_lo = np.logspace(-3.0, -1.0, 9)
    err_lo = [
        abs(R.characteristic_roots(s).lambda1 - R.roots_asymptotic(s, "low").lambda1)
        for s in s_lo
    ]
    rows.append(_in("roots", "lambda1-low-error-slope", loglog_slope(s_lo, err_lo), 6.5, 7.5))
    return rows


def _random_modes(rng, count):
    for _ in range(count):
        xi = rng.standard_normal(2) * 10 ** rng.uniform(-2.0, 2.0)
        v0 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        yield xi, v0


def suite_halfspace(seed):
    rng = np.random.default_rng(seed)
    worst = {"recovery": 0.0, "momentum": 0.0, "divergence": 0.0}
    for xi, v0 in _random_modes(rng, 300):
        sys_ = H.mode_matrix(xi)
        co = H.solve_coefficients(sys_, v0)
        res = H.pde_residual(sys_, co, v0)
        for key in worst:
            worst[key] = max(worst[key], res[key])
    rows = [
        _le("halfspace", "boundary-recovery", worst["recovery"], 1e-12),
        _le("halfspace", "momentum-residual", worst["momentum"], 1e-10),
        _le("halfspace", "divergence-residual", worst["divergence"], 1e-12),
    ]
    edev = 0.0
    for xi, v0 in _random_modes(rng, 20):
        sys_ = H.mode_matrix(xi)
        co = H.solve_coefficients(sys_, v0)
        closed = H.energy_density(sys_, co)
        quad = H.energy_quadrature(sys_, co)
        edev = max(edev, abs(closed - quad) / abs(quad))
    rows.append(_le("halfspace", "energy-closed-vs-quadrature", edev, 1e-8))

    mean = np.array([0.8, -0.5, 0.0])
    trac = H.zero_mode_solution(mean).traction()
    ref = D.MBAR_H @ mean[:2]
    rows.append(
        _le("halfspace", "ekman-traction", float(np.max(np.abs(trac[:2] - ref))), 1e-13)
    )
    return rows


def _traction_reference(xi, v0):
    sys_ = H.mode_matrix(xi)
    amps = np.linalg.solve(sys_.matrix, sys_.rhs_map @ np.asarray(v0, dtype=complex))
    lam = np.array(sys_.roots.lambdas())
    out = (sys_.vel_cols * lam[None, :]) @ amps
    out[2] += sys_.pressure_factors @ amps
    return out


def suite_dtn(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for xi, v0 in _random_modes(rng, 300):
        sym = D.dtn_symbol(xi)
        ref = _traction_reference(xi, v0)
        worst = max(worst, float(np.max(np.abs(sym @ v0 - ref)) / np.max(np.abs(ref))))
    rows = [_le("dtn", "symbol-vs-traction", worst, 1e-10)]

    moduli = 10.0 ** rng.uniform(-3.0, 3.0, size=400)
    angles = rng.uniform(0.0, 2.0 * np.pi, size=400)
    psd = min(
        D.hermitian_minimum_eigenvalue(s * np.array([np.cos(a), np.sin(a)]))
        for s, a in zip(moduli, angles)
    )
    rows.append(
        _row("dtn", "hermitian-part-floor", psd, ">=-1e-10", psd >= -1e-10)
    )

    rec = 0.0
    for s, a in zip(moduli[:200], angles[:200]):
        xi = s * np.array([np.cos(a), np.sin(a)])
        parts = D.dtn_decompose(xi)
        sym = D.dtn_symbol(xi)
        rec = max(rec, float(np.max(np.abs(parts.recompose() - sym)) / np.max(np.abs(sym))))
    rows.append(_le("dtn", "decomposition-recompose", rec, 1e-12))

    qdev = 0.0
    for k in range(5):
        trace = BoundaryTrace.random(32, 2.0 * np.pi, seed=seed + 11 * k)
        a = D.quadratic_form(trace)
        b = D.total_energy_reference(trace)
        qdev = max(qdev, abs(a - b) / abs(b))
    rows.append(_le("dtn", "quadratic-form-vs-energy", qdev, 1e-8))

    s_hi = np.logspace(1.0, 3.0, 9)
    growth = [
        np.linalg.norm(
            D.dtn_symbol(np.array([s, 0.7 * s])) - D.dtn_symbol_stokes(np.array([s, 0.7 * s])),
            ord=2,
        )
        for s in s_hi
    ]
    rows.append(_le("dtn", "stokes-deviation-growth", loglog_slope(s_hi, growth), 0.4))

    s_d = np.logspace(1.0, 2.5, 7)
    d1 = [D.dtn_remainder_derivatives(np.array([s, 0.3 * s]), 1) for s in s_d]
    d3 = [D.dtn_remainder_derivatives(np.array([s, 0.3 * s]), 3) for s in s_d]
    rows.append(_le("dtn", "derivative-order1-slope", loglog_slope(s_d, d1), -0.5))
    rows.append(_le("dtn", "derivative-order3-slope", loglog_slope(s_d, d3), -2.5))
    return rows


def suite_singular(seed):
    period = 2.0 * np.pi
    rng = np.random.default_rng(seed)
    pairs = ((0, 0), (0, 1), (1, 1))
    worst = 0.0
    for k in range(3):
        field = S.SmoothedField.random_mixture(period, seed=seed + k)
        pair = pairs[k]
        pts = rng.uniform(0.0, period, size=(40, 2))
        direct = S.apply_singular(field, pair, pts)
        exact = S.apply_multiplier(field, pair).value(pts)
        scale = np.max(np.abs(exact))
        worst = max(worst, float(np.max(np.abs(direct - exact)) / scale))
    rows = [_le("singular", "real-space-vs-multiplier", worst, 1e-3)]

    field = S.SmoothedField.random_mixture(period, seed=seed + 7)
    pts = rng.uniform(0.0, period, size=(25, 2))
    a = S.apply_singular(field, (0, 1), pts, split_radius=0.5)
    b = S.apply_singular(field, (0, 1), pts, split_radius=2.0)
    scale = np.max(np.abs(b))
    rows.append(
        _le("singular", "split-radius-independence", float(np.max(np.abs(a - b)) / scale), 1e-6)
    )

    worst = 0.0
    x = np.arange(64) * (period / 64)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    for w in (0.5, 2.0, 8.0):
        width = w * period / 16.0
        bump = np.exp(
            -((xx - 0.5 * period) ** 2 + (yy - 0.4 * period) ** 2) / (2.0 * width**2)
        )
        worst = max(worst, S.interpolation_ratio(bump, period, (0, 0)))
    rows.append(
        _le("singular", "interpolation-bound", worst, S.INTERP_BOUND_CONSTANT)
    )
    return rows


def suite_kernels(seed):
    # reduced-size fits: the r^-3 window at period 100 / n 512 supports a
    # -2.2 gate; design-size fits live in the acceptance suite
    period, n, x3 = 100.0, 512, 0.5
    rows = []
    for which in (1, 2):
        slope, _ = K.family_envelope(K.psi_family(n, period, which, x3=x3), period, rmax=25.0)
        rows.append(_le("kernels", "smoke-psi%d-slope" % which, slope, -2.2))
    fams = K.lowfreq_remainder_families(n, period)
    for order in (1, 2, 3, 4):
        slope, _ = K.family_envelope(fams[order], period, rmax=25.0)
        rows.append(_le("kernels", "smoke-lowfreq-rem%d-slope" % order, slope, -2.2))
    envs = []
    centers = None
    for _, row_kernels in K.highfreq_rows(n, period):
        _, (centers, env) = K.family_envelope(row_kernels, period, rmax=25.0)
        envs.append(env)
    rows.append(
        _le(
            "kernels",
            "smoke-highfreq-slope",
            K.decay_exponent(centers, K.merge_envelopes(envs)),
            -2.2,
        )
    )
    return rows


def suite_channel(seed):
    period = 2.0 * np.pi
    trace = BoundaryTrace.random(32, period, seed=seed)
    upper = H.HalfspaceSolution(trace)
    sol = C.solve_channel_flat(trace, 1.0)
    worst = 0.0
    for x3 in (-1.0, -0.5, 0.0):
        ch = sol.velocity_spectrum(x3)
        hs = upper.velocity_spectrum(x3 + 1.0)
        worst = max(worst, float(np.max(np.abs(ch - hs)) / np.max(np.abs(hs))))
    rows = [_le("channel", "flat-transparency", worst, 1e-10)]
    _, diag = C.extend_to_halfspace(sol)
    rows.append(_le("channel", "flat-traction-glue", diag["traction_jump"], 1e-10))

    geom = C.ChannelGeometry.flat(period, 16, 1.0)
    tr16 = BoundaryTrace.random(16, period, seed=seed + 1)
    ref = C.solve_channel_flat_discrete(tr16, 1.0, 17)
    bump = C.solve_channel_bumpy(geom, tr16.v0, 17)
    dev = float(np.max(np.abs(bump.u - ref.u)) / np.max(np.abs(ref.u)))
    rows.append(_le("channel", "zero-amplitude-limit", dev, 1e-8))

    geom = C.ChannelGeometry.bumpy(period, 16, 1.0, 0.15, seed=seed + 2)
    mms = C.manufactured_solution(period, seed=seed + 3)
    errs = []
    for nv in (9, 17, 33):
        disc = C.ChannelDiscretization(geom, nv)
        bottom, forcing, topf, exact = C.manufactured_problem(disc, mms)
        out = C.solve_channel_bumpy(geom, bottom, nv, forcing=forcing, top_forcing=topf)
        errs.append(np.max(np.abs(out.u - exact)) / np.max(np.abs(exact)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    rows.append(_in("channel", "mms-vertical-order-min", float(orders.min()), 1.7, 2.3))
    rows.append(_in("channel", "mms-vertical-order-max", float(orders.max()), 1.7, 2.3))

    data = C.halfspace_restriction_data(geom, BoundaryTrace.random(16, period, seed=seed + 4))
    hom = C.solve_channel_bumpy(geom, data["bottom"], 17)
    phi = C.admissible_test_field(hom.discretization, seed=seed + 5)
    wr = C.weak_residual(hom, phi, data["bottom"])
    rows.append(
        _le("channel", "weak-residual", max(abs(v) for v in wr.values()), 1e-8)
    )
    return rows


SUITES = {
    "roots": suite_roots,
    "halfspace": suite_halfspace,
    "dtn": suite_dtn,
    "singular": suite_singular,
    "kernels": suite_kernels,
    "channel": suite_channel,
}


def run_suites(names, seed):
    rows = []
    for name in names:
        if name not in SUITES:
            raise KeyError("unknown verification suite %r" % name)
        rows.extend(SUITES[name](seed))
    return rows


def write_reports(rows, outdir):
    """One CSV per suite plus an aggregated summary; returns overall pass."""
    os.makedirs(outdir, exist_ok=True)
    by_suite = {}
    for row in rows:
        by_suite.setdefault(row.suite, []).append(row)
    for suite, members in by_suite.items():
        path = os.path.join(outdir, "verify_%s.csv" % suite)
        with open(path, "w") as handle:
            handle.write("suite,check,value,gate,status\n")
            for row in members:
                handle.write(
                    "%s,%s,%.9e,%s,%s\n"
                    % (row.suite, row.check, row.value, row.gate, "pass" if row.passed else "FAIL")
                )
    ok = all(row.passed for row in rows)
    with open(os.path.join(outdir, "verify_summary.txt"), "w") as handle:
        for row in rows:
            handle.write(
                "%-9s %-28s %14.6e  %-12s %s\n"
                % (row.suite, row.check, row.value, row.gate, "pass" if row.passed else "FAIL")
            )
        handle.write("overall: %s\n" % ("pass" if ok else "FAIL"))
    return ok

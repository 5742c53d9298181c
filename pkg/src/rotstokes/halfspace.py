"""Closed-form half-space solves by vertical mode superposition.

At each nonzero horizontal frequency xi the decaying solution of the rotating
Stokes system is a combination of three exponential modes e^{-lambda_k x3}.
Writing the vertical velocity amplitude of mode k as A_k, the boundary
condition u = v0 at x3 = 0 reduces to the 3x3 system M A = T v0-hat with

    M = [[1, 1, 1], [lambda_k], [gap_k^2 / lambda_k]],
    T = [[0, 0, 1], [i xi1, i xi2, 0], [i xi2, -i xi1, 0]]

(rows: vertical trace, divergence at the wall, rotated-gradient trace). The
full velocity of mode k per unit A_k is the column

    c_k = [ (i/|xi|^2) (-lambda_k xi + (gap_k^2/lambda_k) xi_perp), 1 ],

its pressure is (gap_k/lambda_k) e^{-lambda_k x3}, and its traction column
-d3 u + p e3 at the wall is lambda_k c_k + (gap_k/lambda_k) e3, whose third
entry collapses to |xi|^2 / lambda_k.

The zero frequency is the classical Ekman spiral: u1 +- i u2 decay like
e^{-e^{+- i pi/4} x3}, the vertical component and pressure vanish.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import _accel
from .errors import CompatibilityError, SingularFrequencyError
from .fields import BoundaryTrace, FieldGrid, freq_lattice, values_of
from .roots import EKMAN, JCUBE, SpectralRoots, _as_modulus, characteristic_roots


def _as_xi_pair(xi):
    from .roots import Frequency

    if isinstance(xi, Frequency):
        return float(xi.xi1), float(xi.xi2)
    arr = np.asarray(xi, dtype=float)
    if arr.shape != (2,):
        raise ValueError("expected a Frequency or an (xi1, xi2) pair")
    return float(arr[0]), float(arr[1])


def assemble_batch(xi1, xi2):
    """Vectorized mode data for arrays of nonzero frequencies.

    Returns a dict of arrays over the flattened frequency axis m:
      lam, gap, q (3, m); weights W (m, 3, 3) with A = W @ v0hat;
      vel_cols (3, 3, m) [component, mode, frequency]; trac_cols (3, 3, m).
    """
    xi1 = np.asarray(xi1, dtype=float).ravel()
    xi2 = np.asarray(xi2, dtype=float).ravel()
    s = np.hypot(xi1, xi2)
    if np.any(s == 0):
        raise SingularFrequencyError("assemble_batch requires nonzero frequencies")
    m = s.size
    l1, l2, l3, g1, g2, g3 = _accel.roots_batch(s)
    lam = np.stack([l1.astype(complex), l2, l3])
    gap = np.stack([g1, g2, g3])
    mu = gap * gap / lam
    q = gap / lam

    mats = np.empty((m, 3, 3), dtype=complex)
    mats[:, 0, :] = 1.0
    mats[:, 1, :] = lam.T
    mats[:, 2, :] = mu.T
    rhs = np.zeros((m, 3, 3), dtype=complex)
    rhs[:, 0, 2] = 1.0
    rhs[:, 1, 0] = 1j * xi1
    rhs[:, 1, 1] = 1j * xi2
    rhs[:, 2, 0] = 1j * xi2
    rhs[:, 2, 1] = -1j * xi1
    weights = _accel.solve3_batch(mats, rhs)

    s2 = s * s
    vel = np.empty((3, 3, m), dtype=complex)
    vel[0] = (1j / s2) * (-lam * xi1 - mu * xi2)
    vel[1] = (1j / s2) * (-lam * xi2 + mu * xi1)
    vel[2] = 1.0
    trac = np.empty_like(vel)
    trac[0] = lam * vel[0]
    trac[1] = lam * vel[1]
    trac[2] = s2 / lam
    return {
        "s": s,
        "xi1": xi1,
        "xi2": xi2,
        "lam": lam,
        "gap": gap,
        "mu": mu,
        "q": q,
        "weights": weights,
        "vel_cols": vel,
        "trac_cols": trac,
    }


@dataclass(frozen=True)
class ModeSystem:
    """Mode data at a single nonzero frequency."""

    xi1: float
    xi2: float
    roots: SpectralRoots
    matrix: np.ndarray      # (3, 3) M
    rhs_map: np.ndarray     # (3, 3) T
    weights: np.ndarray     # (3, 3) M^{-1} T
    vel_cols: np.ndarray    # (3, 3) [component, mode]
    trac_cols: np.ndarray   # (3, 3)
    pressure_factors: np.ndarray  # (3,) gap_k / lambda_k

    @property
    def modulus(self):
        return float(np.hypot(self.xi1, self.xi2))


def mode_matrix(xi, roots=None):
    """ModeSystem at frequency xi; SingularFrequencyError at xi = 0.

    roots may be supplied (e.g. asymptotic ones) to build the system from
    non-exact exponents; by default the closed-form roots are used.
    """
    x1, x2 = _as_xi_pair(xi)
    if x1 == 0.0 and x2 == 0.0:
        raise SingularFrequencyError(
            "mode matrix is singular at xi = 0; use zero_mode_solution"
        )
    b = assemble_batch([x1], [x2])
    if roots is None:
        roots = SpectralRoots(
            lambda1=float(b["lam"][0, 0].real),
            lambda2=complex(b["lam"][1, 0]),
            lambda3=complex(b["lam"][2, 0]),
            gap1=complex(b["gap"][0, 0]),
            gap2=complex(b["gap"][1, 0]),
            gap3=complex(b["gap"][2, 0]),
        )
        return ModeSystem(
            xi1=x1,
            xi2=x2,
            roots=roots,
            matrix=np.vstack([np.ones(3), b["lam"][:, 0], b["mu"][:, 0]]).astype(complex),
            rhs_map=_rhs_map(x1, x2),
            weights=b["weights"][0],
            vel_cols=b["vel_cols"][:, :, 0],
            trac_cols=b["trac_cols"][:, :, 0],
            pressure_factors=b["q"][:, 0],
        )
    # custom roots: assemble directly
    lam = roots.lambdas()
    gap = roots.gaps()
    mu = gap * gap / lam
    mat = np.vstack([np.ones(3), lam, mu]).astype(complex)
    t = _rhs_map(x1, x2)
    weights = np.linalg.solve(mat, t)
    s2 = x1 * x1 + x2 * x2
    vel = np.empty((3, 3), dtype=complex)
    vel[0] = (1j / s2) * (-lam * x1 - mu * x2)
    vel[1] = (1j / s2) * (-lam * x2 + mu * x1)
    vel[2] = 1.0
    trac = np.empty_like(vel)
    trac[0] = lam * vel[0]
    trac[1] = lam * vel[1]
    trac[2] = s2 / lam
    return ModeSystem(
        xi1=x1, xi2=x2, roots=roots, matrix=mat, rhs_map=t, weights=weights,
        vel_cols=vel, trac_cols=trac, pressure_factors=gap / lam,
    )


def _rhs_map(x1, x2):
    return np.array(
        [[0, 0, 1], [1j * x1, 1j * x2, 0], [1j * x2, -1j * x1, 0]], dtype=complex
    )


def _lambda_diff(lam_i, lam_j, gap_i, gap_j):
    # lam_i - lam_j without high-frequency cancellation: the gaps differ at
    # O(|xi|^{2/3}) where the roots differ at O(|xi|^{-1/3})
    return (gap_j - gap_i) / (lam_i + lam_j)


def mode_determinant(system):
    """det M by stable cofactor reduction (subtract the first column).

    det M = (lambda2 - lambda1)(mu3 - mu1) - (lambda3 - lambda1)(mu2 - mu1),
    mu_k = gap_k^2 / lambda_k, with all differences routed through the gaps so
    the near-equal roots at high frequency do not cancel digits.
    """
    lam = system.roots.lambdas()
    gap = system.roots.gaps()

    def mu_diff(i, j):
        num = lam[j] * (gap[i] - gap[j]) * (gap[i] + gap[j]) - gap[j] ** 2 * _lambda_diff(
            lam[i], lam[j], gap[i], gap[j]
        )
        return num / (lam[i] * lam[j])

    d21 = _lambda_diff(lam[1], lam[0], gap[1], gap[0])
    d31 = _lambda_diff(lam[2], lam[0], gap[2], gap[0])
    return d21 * mu_diff(2, 0) - d31 * mu_diff(1, 0)


def mode_determinant_factored(system):
    """The factored closed form of det M:

    (lambda1 - lambda2)(lambda2 - lambda3)(lambda3 - lambda1)
        (|xi| + lambda1 + lambda2 + lambda3),

    with root differences again evaluated through the gaps. Tends to -2i as
    xi -> 0.
    """
    lam = system.roots.lambdas()
    gap = system.roots.gaps()
    d12 = _lambda_diff(lam[0], lam[1], gap[0], gap[1])
    d23 = _lambda_diff(lam[1], lam[2], gap[1], gap[2])
    d31 = _lambda_diff(lam[2], lam[0], gap[2], gap[0])
    return d12 * d23 * d31 * (system.modulus + lam.sum())


@dataclass(frozen=True)
class ModeCoefficients:
    """Amplitudes A_k of the three decaying modes at one frequency."""

    amplitudes: np.ndarray  # (3,) complex

    @property
    def transformed(self):
        """B = (sum A_k, A1 + j^2 A2 + j A3, A1 + j A2 + j^2 A3), the combos
        that stay O(1) in the low/high frequency expansions."""
        a = self.amplitudes
        return np.array(
            [
                a[0] + a[1] + a[2],
                a[0] + JCUBE**2 * a[1] + JCUBE * a[2],
                a[0] + JCUBE * a[1] + JCUBE**2 * a[2],
            ]
        )


def solve_coefficients(system, v0hat):
    """Mode amplitudes for boundary Fourier data v0hat (3,) at system's xi."""
    v = np.asarray(v0hat, dtype=complex)
    if v.shape != (3,):
        raise ValueError("boundary data must be a 3-vector of Fourier coefficients")
    return ModeCoefficients(amplitudes=system.weights @ v)


def evaluate_velocity(system, coeffs, x3):
    """Velocity Fourier coefficients at heights x3: shape (3,) or (L, 3)."""
    x3a = np.atleast_1d(np.asarray(x3, dtype=float))
    lam = system.roots.lambdas()
    w = coeffs.amplitudes[None, :] * np.exp(-np.outer(x3a, lam))
    out = w @ system.vel_cols.T
    return out[0] if np.isscalar(x3) or np.ndim(x3) == 0 else out


def evaluate_pressure(system, coeffs, x3):
    x3a = np.atleast_1d(np.asarray(x3, dtype=float))
    lam = system.roots.lambdas()
    w = coeffs.amplitudes[None, :] * np.exp(-np.outer(x3a, lam))
    out = w @ system.pressure_factors
    return out[0] if np.isscalar(x3) or np.ndim(x3) == 0 else out


def boundary_traction(system, coeffs):
    """Traction -d3 u + p e3 at the wall, from the closed-form solution."""
    return system.trac_cols @ coeffs.amplitudes


def pde_residual(system, coeffs, v0hat=None):
    """Normalized per-mode residuals of the transformed system.

    momentum: gap_k c_k + e3 x c_k + (i xi1, i xi2, -lambda_k) q_k = 0
    divergence: i xi . c_{k,h} = lambda_k
    recovery (when v0hat given): sum_k A_k c_k = v0hat

    Returns dict of floats; each residual is scaled by the magnitude of the
    largest term entering its identity.
    """
    lam = system.roots.lambdas()
    gap = system.roots.gaps()
    q = system.pressure_factors
    x1, x2 = system.xi1, system.xi2
    mom = 0.0
    div = 0.0
    for k in range(3):
        c = system.vel_cols[:, k]
        r = gap[k] * c
        r = r + np.array([-c[1], c[0], 0.0])
        r = r + np.array([1j * x1, 1j * x2, -lam[k]]) * q[k]
        scale = max(
            abs(gap[k]) * np.max(np.abs(c)),
            np.max(np.abs(c)),
            abs(q[k]) * max(abs(lam[k]), system.modulus),
        )
        mom = max(mom, np.max(np.abs(r)) / scale)
        d = 1j * x1 * c[0] + 1j * x2 * c[1] - lam[k]
        div = max(div, abs(d) / max(abs(lam[k]), system.modulus))
    out = {"momentum": mom, "divergence": div}
    if v0hat is not None:
        v0hat = np.asarray(v0hat, dtype=complex)
        rec = system.vel_cols @ coeffs.amplitudes - v0hat
        out["recovery"] = float(np.max(np.abs(rec)) / max(np.max(np.abs(v0hat)), 1e-300))
    return out


def energy_density(system, coeffs):
    """Closed-form Dirichlet energy of one Fourier mode.

    E(xi) = integral_0^inf |xi|^2 |u-hat|^2 + |d3 u-hat|^2 dx3, evaluated by
    pairing the mode exponentials:

        E = Re sum_{k,l} (|xi|^2 + lambda_k conj(lambda_l))
                          (U_k . conj(U_l)) / (lambda_k + conj(lambda_l))

    with U_k = A_k c_k. The imaginary part of the pairing is the rotation
    term, which does no work.
    """
    lam = system.roots.lambdas()
    u = system.vel_cols * coeffs.amplitudes[None, :]  # (3 comp, 3 mode)
    s2 = system.modulus**2
    dots = u.conj().T @ u  # dots[l, k] = U_k . conj(U_l)
    lk = lam[None, :]
    ll = np.conj(lam)[:, None]
    e = np.sum((s2 + lk * ll) * dots / (lk + ll))
    return float(e.real)


def energy_quadrature(system, coeffs, rtol=1e-11):
    """Dirichlet energy by adaptive quadrature over x3 (cross-check path).

    The integrand mixes decay scales 1/Re(lambda_k) that can span six decades
    (lambda1 ~ |xi|^3 at low frequency), so the axis is split into segments
    tied to each scale before handing the pieces to the adaptive rule.
    """
    s2 = system.modulus**2
    lam = system.roots.lambdas()

    def integrand(x3):
        w = coeffs.amplitudes * np.exp(-lam * x3)
        u = system.vel_cols @ w
        du = -(system.vel_cols @ (lam * w))
        return s2 * float(np.sum(np.abs(u) ** 2)) + float(np.sum(np.abs(du) ** 2))

    rates = [max(r.real, 1e-9) for r in lam]
    first = 0.25 / max(rates)
    upper = 25.0 / min(rates)
    # geometric ladder, ratio 4: no segment spans more than one scale decade,
    # otherwise fast cross-terms hide between the nodes of a wide panel
    pts = [0.0, first]
    while pts[-1] < upper:
        pts.append(min(4.0 * pts[-1], upper))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b <= a:
            continue
        val, _ = quad(integrand, a, b, epsrel=rtol, epsabs=0.0, limit=200)
        total += val
    return total


@dataclass(frozen=True)
class EkmanProfile:
    """Zero-frequency (horizontal mean) solution: the Ekman spiral.

    In the rotated variables w+- = u1 +- i u2 the system decouples into
    w+-'' = +- i w+-, so the decaying profiles are
    w+- (x3) = w+-(0) e^{-e^{+- i pi/4} x3}; u3 and p vanish identically.
    """

    wplus0: complex
    wminus0: complex

    @classmethod
    def from_mean(cls, v0mean):
        v = np.asarray(v0mean, dtype=complex)
        if v.shape != (3,):
            raise ValueError("mean boundary velocity must be a 3-vector")
        if abs(v[2]) > 1e-12 * max(1.0, np.max(np.abs(v))):
            raise CompatibilityError(
                "zero-mode vertical velocity %g must vanish (no decaying mode carries it)"
                % abs(v[2])
            )
        return cls(wplus0=complex(v[0] + 1j * v[1]), wminus0=complex(v[0] - 1j * v[1]))

    def velocity(self, x3):
        x3a = np.atleast_1d(np.asarray(x3, dtype=float))
        wp = self.wplus0 * np.exp(-EKMAN * x3a)
        wm = self.wminus0 * np.exp(-np.conj(EKMAN) * x3a)
        u = np.stack([(wp + wm) / 2.0, (wp - wm) / 2j, np.zeros_like(wp)], axis=-1)
        return u[0] if np.ndim(x3) == 0 else u

    def traction(self):
        """-d3 u_h at the wall (pressure vanishes): the Ekman pumping map.

        For real boundary means this equals (sqrt2/2) [[1, -1], [1, 1]] acting
        on the horizontal mean, extended by 0 vertically.
        """
        tp = EKMAN * self.wplus0
        tm = np.conj(EKMAN) * self.wminus0
        return np.array([(tp + tm) / 2.0, (tp - tm) / 2j, 0.0])

    def energy(self):
        """integral_0^inf |d3 u_h|^2 dx3 = (|w+|^2 + |w-|^2) / (2 sqrt2)."""
        return (abs(self.wplus0) ** 2 + abs(self.wminus0) ** 2) / (2.0 * np.sqrt(2.0))


def zero_mode_solution(v0mean):
    """Ekman spiral for the horizontal mean of the boundary data."""
    return EkmanProfile.from_mean(v0mean)


class HalfspaceSolution:
    """Spectral solution over a full boundary trace lattice.

    Holds per-frequency mode amplitudes plus the zero-mode Ekman profile;
    evaluation methods return coefficient arrays (3, n, n) ready for
    values_of().
    """

    def __init__(self, trace):
        if not isinstance(trace, BoundaryTrace):
            raise TypeError("solve expects a BoundaryTrace")
        self.trace = trace
        n = trace.n
        xx, yy = freq_lattice(n, trace.period)
        mask = np.ones((n, n), dtype=bool)
        mask[0, 0] = False
        self._mask = mask
        self._batch = assemble_batch(xx[mask], yy[mask])
        vhat = trace.spectrum[:, mask]  # (3, m)
        self._amps = np.einsum("mij,jm->im", self._batch["weights"], vhat)
        mean = trace.spectrum[:, 0, 0]
        self.ekman = EkmanProfile.from_mean(mean)
        self.n = n
        self.period = trace.period

    def velocity_spectrum(self, x3):
        """(3, n, n) Fourier coefficients of u(., x3)."""
        out = np.zeros((3, self.n, self.n), dtype=complex)
        prof = _accel.mode_profiles(
            self._batch["lam"], self._amps, self._batch["vel_cols"], np.array([float(x3)])
        )[0]
        out[:, self._mask] = prof
        out[:, 0, 0] = self.ekman.velocity(float(x3))
        return out

    def velocity_levels(self, x3_levels):
        """(L, 3, n, n) coefficients for many heights in one batched pass."""
        x3_levels = np.asarray(x3_levels, dtype=float)
        prof = _accel.mode_profiles(
            self._batch["lam"], self._amps, self._batch["vel_cols"], x3_levels
        )
        out = np.zeros((x3_levels.size, 3, self.n, self.n), dtype=complex)
        out[:, :, self._mask] = prof
        out[:, :, 0, 0] = self.ekman.velocity(x3_levels)
        return out

    def pressure_spectrum(self, x3):
        out = np.zeros((self.n, self.n), dtype=complex)
        w = self._amps * np.exp(-self._batch["lam"] * float(x3))
        out[self._mask] = np.sum(self._batch["q"] * w, axis=0)
        return out

    def traction_spectrum(self):
        """(3, n, n) coefficients of -d3 u + p e3 at the wall."""
        out = np.zeros((3, self.n, self.n), dtype=complex)
        out[:, self._mask] = np.einsum("ikm,km->im", self._batch["trac_cols"], self._amps)
        out[:, 0, 0] = self.ekman.traction()
        return out

    def total_energy(self):
        """Dirichlet energy over the periodic cell, sum of closed forms."""
        lam = self._batch["lam"]
        u = self._batch["vel_cols"] * self._amps[None, :, :]  # (3, 3, m)
        s2 = self._batch["s"] ** 2
        dots = np.einsum("ikm,ilm->klm", u, np.conj(u))  # U_k . conj(U_l)
        lk = lam[:, None, :]
        ll = np.conj(lam)[None, :, :]
        e = np.sum((s2[None, None, :] + lk * ll) * dots / (lk + ll), axis=(0, 1))
        total = float(np.sum(e.real)) + self.ekman.energy()
        return self.period**2 * total


def solve_field(trace, x3_levels):
    """Sample the half-space solution on horizontal lattices at given heights."""
    sol = HalfspaceSolution(trace)
    x3_levels = np.asarray(x3_levels, dtype=float)
    if np.any(x3_levels < 0):
        raise ValueError("heights must be nonnegative")
    spec = sol.velocity_levels(x3_levels)
    vel = np.stack([values_of(spec[l]) for l in range(x3_levels.size)])
    prs = np.stack(
        [values_of(sol.pressure_spectrum(x3)) for x3 in x3_levels]
    )
    return FieldGrid(period=trace.period, x3=x3_levels, velocity=vel, pressure=prs)

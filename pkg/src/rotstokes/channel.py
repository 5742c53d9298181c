"""Bottom-bounded channel solves with a transparent top interface.

The channel occupies omega(x_h) < x3 < 0 over a periodic horizontal cell,
with Dirichlet data on the bottom surface and the half-space
Dirichlet-to-Neumann map closing the system at the top: the traction
-d3 u + p e3 at x3 = 0 must equal the DtN symbol applied to the top trace,
which makes the solve agree with restricting a decaying upper half-space
solution whenever the data are compatible.

Flat bottoms are solved exactly, frequency by frequency, in the basis of the
six characteristic exponentials e^{-+lambda_k x3} (the gap variable is even
in lambda, so the downward roots mirror the upward ones). Columns are
anchored where their profile is largest, bottom for upward-decaying and top
for downward-decaying modes, keeping the 6x6 systems well conditioned at
every frequency. The zero mode is the Ekman spiral, for which transparency
is exact and the channel profile is just the half-space spiral continued.

Bumpy bottoms are flattened with sigma = (x3 - omega)/(-omega) in [0, 1],
discretized pseudo-spectrally in x_h and with second-order staggered finite
differences in sigma (velocity on nodes, pressure on midcells), and solved
matrix-free by preconditioned GMRES; the preconditioner is the per-frequency
LU of the same discretization over a flat bottom at the mean depth, which
doubles as the discrete flat solver for the zero-amplitude limit.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .dtn import MBAR_H, dtn_symbol_batch
from .errors import ConvergenceError
from .fields import (
    BoundaryTrace,
    freq_lattice,
    hermitianize,
    spec_of,
    values_of,
)
from .halfspace import HalfspaceSolution, assemble_batch
from .roots import EKMAN

__all__ = [
    "ChannelGeometry",
    "FlatChannelSolution",
    "solve_channel_flat",
    "extend_to_halfspace",
    "ChannelDiscretization",
    "BumpyChannelSolution",
    "solve_channel_bumpy",
    "solve_channel_flat_discrete",
    "halfspace_restriction_data",
    "TrigField",
    "ManufacturedSolution",
    "manufactured_solution",
    "manufactured_problem",
    "admissible_test_field",
    "weak_residual",
    "channel_dirichlet_energy",
]


@dataclass(frozen=True)
class ChannelGeometry:
    """Periodic channel geometry: bottom surface x3 = omega(x_h) < 0."""

    period: float
    omega: np.ndarray

    def __post_init__(self):
        om = np.asarray(self.omega, dtype=float)
        if om.ndim != 2 or om.shape[0] != om.shape[1]:
            raise ValueError("omega must be a square horizontal grid")
        if np.any(om >= 0.0):
            raise ValueError("the bottom surface must stay strictly below x3 = 0")
        object.__setattr__(self, "omega", om)

    @classmethod
    def flat(cls, period, n, depth):
        if depth <= 0.0:
            raise ValueError("depth must be positive")
        return cls(period=float(period), omega=np.full((n, n), -float(depth)))

    @classmethod
    def bumpy(cls, period, n, depth, amplitude, seed=0, kmax=2):
        """Random smooth bump field of the given amplitude about -depth."""
        rng = np.random.default_rng(seed)
        x = np.arange(n) * (period / n)
        xx, yy = np.meshgrid(x, x, indexing="ij")
        bump = np.zeros((n, n))
        for k1 in range(-kmax, kmax + 1):
            for k2 in range(-kmax, kmax + 1):
                if k1 == 0 and k2 == 0:
                    continue
                w = 2.0 * np.pi / period
                bump += rng.standard_normal() * np.cos(
                    w * (k1 * xx + k2 * yy) + rng.uniform(0, 2 * np.pi)
                )
        peak = np.max(np.abs(bump))
        if peak > 0.0:
            bump *= amplitude / peak
        geom = cls(period=float(period), omega=-depth + bump)
        return geom

    @property
    def n(self):
        return self.omega.shape[0]

    @property
    def eta(self):
        """Depth field -omega > 0."""
        return -self.omega

    @property
    def mean_depth(self):
        return float(np.mean(self.eta))

    @property
    def amplitude(self):
        return float(0.5 * (np.max(self.omega) - np.min(self.omega)))

    def eta_gradients(self):
        """Spectral horizontal derivatives (d1 eta, d2 eta)."""
        kx, ky = freq_lattice(self.n, self.period)
        spec = spec_of(self.eta)
        n = self.n
        d1 = values_of(hermitianize(1j * kx * spec))
        d2 = values_of(hermitianize(1j * ky * spec))
        return d1, d2


def _flat_columns(xi1, xi2):
    """Velocity/traction columns of the six exponential modes, batched.

    Modes 0..2 carry profile e^{-lambda_k (x3 + H)} (anchored at the bottom),
    modes 3..5 carry e^{+lambda_k x3} (anchored at the top). The downward
    root -lambda_k has the same gap, mu flips sign with lambda, so its
    velocity column is (-c_h, 1) and its pressure factor is -q.
    """
    b = assemble_batch(xi1, xi2)
    m = b["s"].shape[0]
    vel = np.zeros((3, 6, m), dtype=complex)
    trac = np.zeros((3, 6, m), dtype=complex)
    pfac = np.zeros((6, m), dtype=complex)
    vel[:, :3] = b["vel_cols"]
    vel[:2, 3:] = -b["vel_cols"][:2]
    vel[2, 3:] = b["vel_cols"][2]
    lam6 = np.concatenate([b["lam"], -b["lam"]], axis=0)
    pfac[:3] = b["q"]
    pfac[3:] = -b["q"]
    # traction column at fixed x3 is (lambda_mode * vel + q * e3) * profile
    trac[:] = lam6[None, :, :] * vel
    trac[2] += pfac
    return vel, trac, lam6, pfac


@dataclass
class FlatChannelSolution:
    """Exact modal solution of the flat channel with transparent top."""

    period: float
    depth: float
    mask: np.ndarray
    amplitudes: np.ndarray  # (6, m)
    vel_cols: np.ndarray  # (3, 6, m)
    lam6: np.ndarray  # (6, m)
    pfac: np.ndarray  # (6, m)
    ekman_top: np.ndarray  # (w+ , w-) values at x3 = 0
    n: int = field(init=False)

    def __post_init__(self):
        self.n = self.mask.shape[0]

    def _profiles(self, x3):
        """Mode profiles at height x3 in [-H, 0], shape (6, m)."""
        lam = self.lam6
        out = np.empty_like(lam)
        out[:3] = np.exp(-lam[:3] * (x3 + self.depth))
        out[3:] = np.exp(-lam[3:] * x3)  # lam6[3:] = -lambda: e^{+lambda x3}
        return out

    def velocity_spectrum(self, x3):
        if not (-self.depth - 1e-12 <= x3 <= 1e-12):
            raise ValueError("height must lie inside the channel")
        prof = self._profiles(x3)
        out = np.zeros((3, self.n, self.n), dtype=complex)
        out[:, self.mask] = np.einsum(
            "ikm,km,km->im", self.vel_cols, self.amplitudes, prof
        )
        wp = self.ekman_top[0] * np.exp(-EKMAN * x3)
        wm = self.ekman_top[1] * np.exp(-np.conj(EKMAN) * x3)
        out[0, 0, 0] = 0.5 * (wp + wm)
        out[1, 0, 0] = 0.5 * (wp - wm) / 1j
        return out

    def pressure_spectrum(self, x3):
        prof = self._profiles(x3)
        out = np.zeros((self.n, self.n), dtype=complex)
        out[self.mask] = np.einsum("km,km,km->m", self.pfac, self.amplitudes, prof)
        return out

    def traction_spectrum(self, x3):
        """-d3 u + p e3 per frequency from the modal derivative."""
        prof = self._profiles(x3)
        out = np.zeros((3, self.n, self.n), dtype=complex)
        trac = self.lam6[None, :, :] * self.vel_cols
        trac_amp = np.einsum("ikm,km,km->im", trac, self.amplitudes, prof)
        trac_amp[2] += np.einsum("km,km,km->m", self.pfac, self.amplitudes, prof)
        out[:, self.mask] = trac_amp
        wp = self.ekman_top[0] * np.exp(-EKMAN * x3) * EKMAN
        wm = self.ekman_top[1] * np.exp(-np.conj(EKMAN) * x3) * np.conj(EKMAN)
        out[0, 0, 0] = 0.5 * (wp + wm)
        out[1, 0, 0] = 0.5 * (wp - wm) / 1j
        return out

    def top_trace(self):
        return BoundaryTrace(self.period, values_of(self.velocity_spectrum(0.0)))

    def velocity_values(self, x3):
        return values_of(self.velocity_spectrum(x3))


def solve_channel_flat(bottom, depth):
    """Exact flat-channel solve from bottom Dirichlet data.

    bottom is a BoundaryTrace holding the velocity on x3 = -depth; the top
    x3 = 0 carries the transparent (DtN) condition. Per nonzero frequency a
    6x6 system balances three bottom Dirichlet rows against three top rows
    traction - DtN * velocity = 0; the zero mode is the continued Ekman
    spiral (transparency is exact there) and requires mean-zero u3.
    """
    if not isinstance(bottom, BoundaryTrace):
        raise TypeError("bottom data must be a BoundaryTrace")
    if depth <= 0.0:
        raise ValueError("depth must be positive")
    n = bottom.n
    kx, ky = freq_lattice(n, bottom.period)
    mask = np.ones((n, n), dtype=bool)
    mask[0, 0] = False
    x1, x2 = kx[mask], ky[mask]
    vel, trac, lam6, pfac = _flat_columns(x1, x2)
    m = x1.shape[0]

    prof_bot = np.empty((6, m), dtype=complex)
    prof_bot[:3] = 1.0
    prof_bot[3:] = np.exp(-lam6[:3] * depth)
    prof_top = np.empty((6, m), dtype=complex)
    prof_top[:3] = np.exp(-lam6[:3] * depth)
    prof_top[3:] = 1.0

    msc = dtn_symbol_batch(x1, x2)
    rows_top = trac - np.einsum("ijm,jkm->ikm", msc, vel)

    system = np.empty((m, 6, 6), dtype=complex)
    system[:, :3, :] = np.transpose(vel * prof_bot[None, :, :], (2, 0, 1))
    system[:, 3:, :] = np.transpose(rows_top * prof_top[None, :, :], (2, 0, 1))
    rhs = np.zeros((m, 6), dtype=complex)
    rhs[:, :3] = bottom.spectrum[:, mask].T
    amps = np.linalg.solve(system, rhs[:, :, None])[:, :, 0]

    # mean-zero u3 was enforced when the trace was built; only the
    # horizontal means survive into the channel Ekman spiral
    mean = bottom.spectrum[:, 0, 0]
    wp_bot = mean[0] + 1j * mean[1]
    wm_bot = mean[0] - 1j * mean[1]
    ekman_top = np.array(
        [wp_bot * np.exp(-EKMAN * depth), wm_bot * np.exp(-np.conj(EKMAN) * depth)]
    )
    return FlatChannelSolution(
        period=bottom.period,
        depth=float(depth),
        mask=mask,
        amplitudes=amps.T,
        vel_cols=vel,
        lam6=lam6,
        pfac=pfac,
        ekman_top=ekman_top,
    )


def extend_to_halfspace(solution):
    """Glue the upper half-space solution onto the channel's top trace.

    Returns (halfspace_solution, diagnostics) with the measured velocity and
    traction jumps across the interface, relative to each field's scale. The
    trace is shared, so the velocity jump is the boundary-recovery error of
    the two solvers, not an identical zero.
    """
    trace = solution.top_trace()
    upper = HalfspaceSolution(trace)
    vbelow = solution.velocity_spectrum(0.0)
    vabove = upper.velocity_spectrum(0.0)
    vscale = max(float(np.max(np.abs(vabove))), 1e-300)
    below = solution.traction_spectrum(0.0)
    above = upper.traction_spectrum()
    scale = max(float(np.max(np.abs(above))), 1e-300)
    diag = {
        "velocity_jump": float(np.max(np.abs(vbelow - vabove))) / vscale,
        "traction_jump": float(np.max(np.abs(below - above))) / scale,
    }
    return upper, diag


class _Spectral:
    """Horizontal pseudo-spectral derivatives on the periodic lattice.

    Odd-derivative multipliers zero the Nyquist column so that every operator
    maps real grids to real grids one frequency at a time; the Laplacian
    multiplier is even and needs no adjustment.
    """

    def __init__(self, n, period):
        kx, ky = freq_lattice(n, period)
        kx1, ky1 = kx.copy(), ky.copy()
        if n % 2 == 0:
            kx1[n // 2, :] = 0.0
            ky1[:, n // 2] = 0.0
        self.dmult = (1j * kx1, 1j * ky1)
        self.lapmult = -(kx**2 + ky**2)

    def dx(self, f, axis):
        return np.fft.ifft2(np.fft.fft2(f) * self.dmult[axis]).real

    def lap_h(self, f):
        return np.fft.ifft2(np.fft.fft2(f) * self.lapmult).real


def _lattice_conjugate(grid):
    """Values at the negated lattice frequencies, conjugated (last two axes)."""
    out = np.conj(grid)
    for ax in (-2, -1):
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


def _dtn_symbol_grid(n, period):
    """(3, 3, n, n) transparent-boundary symbol, lattice-symmetrized.

    Averaging M(xi) with conj M(-xi) leaves the symbol unchanged wherever the
    conjugate partner carries the continuum frequency -xi, and projects the
    self-paired Nyquist rows so that applying the grid symbol followed by a
    real-part projection acts one lattice frequency at a time. That exact
    frequency-diagonal structure is what lets a per-frequency factorization
    reproduce the grid operator over a flat bottom.
    """
    kx, ky = freq_lattice(n, period)
    mask = np.ones((n, n), dtype=bool)
    mask[0, 0] = False
    sym = np.zeros((3, 3, n, n), dtype=complex)
    sym[:, :, mask] = dtn_symbol_batch(kx[mask], ky[mask])
    sym[:2, :2, 0, 0] = MBAR_H
    return 0.5 * (sym + _lattice_conjugate(sym))


class ChannelDiscretization:
    """Second-order staggered discretization of the flattened channel.

    Velocity lives on the nv sigma-nodes, pressure on the nv - 1 midcells.
    Horizontal derivatives are pseudo-spectral; vertical first derivatives
    are staggered differences whose composition yields the compact 3-point
    second derivative. The state vector concatenates u (3, nv, n, n) and
    p (nv - 1, n, n), and residual rows mirror that layout: bottom Dirichlet
    at sigma = 0, momentum at interior nodes, the transparent traction rows
    at sigma = 1, and continuity at the midcells.
    """

    def __init__(self, geometry, nv):
        if nv < 4:
            raise ValueError("need at least 4 vertical nodes")
        self.geometry = geometry
        self.nv = int(nv)
        self.J = self.nv - 1
        self.h = 1.0 / self.J
        self.n = geometry.n
        self.period = geometry.period
        self.spec = _Spectral(self.n, self.period)
        self.eta = geometry.eta
        self.inv_eta = 1.0 / self.eta
        d1, d2 = geometry.eta_gradients()
        # beta_i = (1 - sigma) * d_i eta / eta multiplies d_sigma inside
        # horizontal derivatives; the sigma factor is kept separate
        self.gcoef = (d1 * self.inv_eta, d2 * self.inv_eta)
        self.sigma = np.linspace(0.0, 1.0, self.nv)
        self.sigma_mid = 0.5 * (self.sigma[1:] + self.sigma[:-1])
        self.bnode = 1.0 - self.sigma
        self.bmid = 1.0 - self.sigma_mid
        self.msym = _dtn_symbol_grid(self.n, self.period)
        self.size = (3 * self.nv + self.J) * self.n * self.n

    def heights(self):
        """Physical x3 of the sigma-nodes, shape (nv, n, n)."""
        return self.eta[None] * (self.sigma[:, None, None] - 1.0)

    def pack(self, u, p):
        return np.concatenate([u.ravel(), p.ravel()])

    def unpack(self, x):
        n, nv, J = self.n, self.nv, self.J
        cut = 3 * nv * n * n
        u = x[:cut].reshape(3, nv, n, n)
        p = x[cut:].reshape(J, n, n)
        return u, p

    def dtn_grid_apply(self, utop):
        """Symbol application on a (3, n, n) grid of top-trace samples."""
        ft = np.fft.fft2(utop)
        out = np.einsum("ijkl,jkl->ikl", self.msym, ft)
        return np.fft.ifft2(out).real

    def apply(self, x):
        """Residual-operator action on a packed state vector."""
        J, h = self.J, self.h
        u, p = self.unpack(np.asarray(x, dtype=float))
        ru = np.empty_like(u)
        rp = np.empty_like(p)
        inv_eta2 = self.inv_eta**2
        bn = self.bnode[1:J, None, None]
        bm = self.bmid[:, None, None]

        ru[:, 0] = u[:, 0]
        for c in range(3):
            uc = u[c]
            lap = self.spec.lap_h(uc[1:J])
            lap += (uc[2:] - 2.0 * uc[1:J] + uc[: J - 1]) / h**2 * inv_eta2
            tc = (uc[2:] - uc[: J - 1]) / (2.0 * h)
            w = np.diff(uc, axis=0) / h
            for i in (0, 1):
                gi = self.gcoef[i]
                bnod = bn * gi
                lap += self.spec.dx(bnod * tc, i)
                dui = self.spec.dx(uc, i)
                lap += bnod * (dui[2:] - dui[: J - 1]) / (2.0 * h)
                wm = (bm * gi) * w
                lap += bnod * (wm[1:] - wm[: J - 1]) / h
            ru[c, 1:J] = -lap
        ru[0, 1:J] -= u[1, 1:J]
        ru[1, 1:J] += u[0, 1:J]

        pa = 0.5 * (p[1:] + p[: J - 1])
        pd = (p[1:] - p[: J - 1]) / h
        for i in (0, 1):
            ru[i, 1:J] += self.spec.dx(pa, i) + (bn * self.gcoef[i]) * pd
        ru[2, 1:J] += self.inv_eta * pd

        dtop = (3.0 * u[:, J] - 4.0 * u[:, J - 1] + u[:, J - 2]) / (2.0 * h)
        ru[:, J] = -self.inv_eta * dtop - self.dtn_grid_apply(u[:, J])
        ru[2, J] += 1.5 * p[J - 1] - 0.5 * p[J - 2]

        div = self.inv_eta * np.diff(u[2], axis=0) / h
        for i in (0, 1):
            ui = u[i]
            avg = 0.5 * (ui[1:] + ui[:J])
            div = div + self.spec.dx(avg, i)
            div = div + (bm * self.gcoef[i]) * (np.diff(ui, axis=0) / h)
        rp[:] = div
        return self.pack(ru, rp)

    def assemble_rhs(self, bottom, forcing=None, top_forcing=None):
        """Right-hand side vector from boundary data and optional forcing.

        bottom: (3, n, n) velocity samples on the bottom surface. forcing:
        (3, nv, n, n) momentum source at the nodes (interior rows only).
        top_forcing: (3, n, n) inhomogeneity of the transparent rows.
        """
        u = np.zeros((3, self.nv, self.n, self.n))
        p = np.zeros((self.J, self.n, self.n))
        u[:, 0] = bottom
        if forcing is not None:
            u[:, 1 : self.J] = forcing[:, 1 : self.J]
        if top_forcing is not None:
            u[:, self.J] = top_forcing
        return self.pack(u, p)

    # ---- flat-bottom per-frequency blocks ------------------------------

    def _slot(self, level, comp):
        return 4 * level + comp

    def flat_blocks(self, depth, indices):
        """Dense (len(indices), K, K) flat-bottom blocks at the given depth.

        indices selects flattened lattice frequencies. Block unknown order
        interleaves (u1, u2, u3, p) level by level, K = 4 nv - 1, which keeps
        the bandwidth small and the factorization fill local.
        """
        J, h = self.J, self.h
        K = 4 * self.nv - 1
        d = (
            self.spec.dmult[0].ravel()[indices],
            self.spec.dmult[1].ravel()[indices],
        )
        lap = -self.spec.lapmult.ravel()[indices]
        msym = self.msym.reshape(3, 3, -1)[:, :, indices]
        m = lap.shape[0]
        B = np.zeros((m, K, K), dtype=complex)
        ieta, ieta2 = 1.0 / depth, 1.0 / depth**2
        diag_v = lap + 2.0 * ieta2 / h**2
        off_v = -ieta2 / h**2
        for c in range(3):
            B[:, c, c] = 1.0
        for j in range(1, J):
            for c in range(3):
                row = self._slot(j, c)
                B[:, row, self._slot(j, c)] += diag_v
                B[:, row, self._slot(j - 1, c)] += off_v
                B[:, row, self._slot(j + 1, c)] += off_v
            B[:, self._slot(j, 0), self._slot(j, 1)] += -1.0
            B[:, self._slot(j, 1), self._slot(j, 0)] += 1.0
            for c in (0, 1):
                B[:, self._slot(j, c), self._slot(j - 1, 3)] += 0.5 * d[c]
                B[:, self._slot(j, c), self._slot(j, 3)] += 0.5 * d[c]
            B[:, self._slot(j, 2), self._slot(j, 3)] += ieta / h
            B[:, self._slot(j, 2), self._slot(j - 1, 3)] += -ieta / h
        for c in range(3):
            row = self._slot(J, c)
            B[:, row, self._slot(J, c)] += -1.5 * ieta / h
            B[:, row, self._slot(J - 1, c)] += 2.0 * ieta / h
            B[:, row, self._slot(J - 2, c)] += -0.5 * ieta / h
            for cc in range(3):
                B[:, row, self._slot(J, cc)] += -msym[c, cc]
        B[:, self._slot(J, 2), self._slot(J - 1, 3)] += 1.5
        B[:, self._slot(J, 2), self._slot(J - 2, 3)] += -0.5
        for j in range(J):
            row = self._slot(j, 3)
            for c in (0, 1):
                B[:, row, self._slot(j, c)] += 0.5 * d[c]
                B[:, row, self._slot(j + 1, c)] += 0.5 * d[c]
            B[:, row, self._slot(j + 1, 2)] += ieta / h
            B[:, row, self._slot(j, 2)] += -ieta / h
        return B

    def _state_to_freq(self, x):
        """Pack FFT coefficients into per-frequency block vectors (m, K)."""
        u, p = self.unpack(x)
        m = self.n * self.n
        K = 4 * self.nv - 1
        uf = np.fft.fft2(u).reshape(3, self.nv, m)
        pf = np.fft.fft2(p).reshape(self.J, m)
        Z = np.empty((m, K), dtype=complex)
        for j in range(self.nv):
            for c in range(3):
                Z[:, self._slot(j, c)] = uf[c, j]
        for j in range(self.J):
            Z[:, self._slot(j, 3)] = pf[j]
        return Z

    def _freq_to_state(self, Z):
        n, m = self.n, self.n * self.n
        uf = np.empty((3, self.nv, m), dtype=complex)
        pf = np.empty((self.J, m), dtype=complex)
        for j in range(self.nv):
            for c in range(3):
                uf[c, j] = Z[:, self._slot(j, c)]
        for j in range(self.J):
            pf[j] = Z[:, self._slot(j, 3)]
        u = np.fft.ifft2(uf.reshape(3, self.nv, n, n)).real
        p = np.fft.ifft2(pf.reshape(self.J, n, n)).real
        return self.pack(u, p)

    def flat_solve(self, depth, rhs, chunk=256):
        """Direct per-frequency solve of the flat discretization at depth."""
        m = self.n * self.n
        Z = self._state_to_freq(rhs)
        out = np.empty_like(Z)
        for lo in range(0, m, chunk):
            idx = np.arange(lo, min(lo + chunk, m))
            B = self.flat_blocks(depth, idx)
            out[idx] = np.linalg.solve(B, Z[idx][:, :, None])[:, :, 0]
        return self._freq_to_state(out)

    def flat_factorization(self, depth, chunk=256):
        """Sparse LU of all flat blocks stacked block-diagonally."""
        m = self.n * self.n
        pieces = []
        for lo in range(0, m, chunk):
            idx = np.arange(lo, min(lo + chunk, m))
            B = self.flat_blocks(depth, idx)
            pieces.extend(sp.csc_matrix(B[i]) for i in range(B.shape[0]))
        big = sp.block_diag(pieces, format="csc")
        return spla.splu(big)

    def preconditioner(self, depth=None):
        """LinearOperator applying the inverse flat discretization."""
        depth = self.geometry.mean_depth if depth is None else float(depth)
        lu = self.flat_factorization(depth)

        def matvec(x):
            Z = self._state_to_freq(np.asarray(x, dtype=float))
            sol = lu.solve(Z.ravel()).reshape(Z.shape)
            return self._freq_to_state(sol)

        return spla.LinearOperator((self.size, self.size), matvec=matvec)


@dataclass
class BumpyChannelSolution:
    """Discrete channel solution: velocity on nodes, pressure on midcells."""

    discretization: ChannelDiscretization
    u: np.ndarray  # (3, nv, n, n)
    p: np.ndarray  # (nv - 1, n, n)
    info: dict

    @property
    def geometry(self):
        return self.discretization.geometry

    def top_trace(self):
        """Top-boundary trace; removes the solver-tolerance u3 mean."""
        vals = self.u[:, -1].copy()
        vals[2] -= np.mean(vals[2])
        return BoundaryTrace(self.discretization.period, vals)


def solve_channel_flat_discrete(bottom, depth, nv, n=None, period=None, geometry=None):
    """Flat-bottom channel solve on the same grids the bumpy solver uses.

    This is the zero-bump-amplitude limit of solve_channel_bumpy, computed
    directly: the discretization decouples per lattice frequency, so each
    block is solved densely. bottom is a (3, n, n) sample array (or a
    BoundaryTrace), and the result is a BumpyChannelSolution.
    """
    if isinstance(bottom, BoundaryTrace):
        period = bottom.period
        bottom = bottom.v0
    if geometry is None:
        geometry = ChannelGeometry.flat(period, bottom.shape[-1], depth)
    disc = ChannelDiscretization(geometry, nv)
    rhs = disc.assemble_rhs(bottom)
    x = disc.flat_solve(depth, rhs)
    u, p = disc.unpack(x)
    return BumpyChannelSolution(disc, u, p, info={"method": "direct-flat"})


def solve_channel_bumpy(
    geometry,
    bottom,
    nv,
    forcing=None,
    top_forcing=None,
    rtol=1e-8,
    restart=50,
    maxiter=200,
    precondition_depth=None,
):
    """Iterative channel solve over a bumpy bottom surface.

    GMRES on the flattened-coordinate discretization, preconditioned by the
    per-frequency LU factorization of the flat discretization at the mean
    depth. bottom holds velocity samples on the bump surface (3, n, n);
    optional forcing/top_forcing feed manufactured problems. Raises
    ConvergenceError if the Krylov budget is exhausted.
    """
    disc = ChannelDiscretization(geometry, nv)
    rhs = disc.assemble_rhs(np.asarray(bottom, dtype=float), forcing, top_forcing)
    op = spla.LinearOperator((disc.size, disc.size), matvec=disc.apply, dtype=float)
    precond = disc.preconditioner(precondition_depth)
    iters = [0]

    def count(_):
        iters[0] += 1

    try:
        x, code = spla.gmres(
            op,
            rhs,
            M=precond,
            rtol=rtol,
            atol=0.0,
            restart=restart,
            maxiter=maxiter,
            callback=count,
            callback_type="pr_norm",
        )
    except TypeError:  # older scipy spells the tolerance "tol"
        x, code = spla.gmres(
            op,
            rhs,
            M=precond,
            tol=rtol,
            atol=0.0,
            restart=restart,
            maxiter=maxiter,
            callback=count,
            callback_type="pr_norm",
        )
    if code != 0:
        raise ConvergenceError(
            "channel GMRES did not reach rtol=%g in %d iterations" % (rtol, iters[0])
        )
    res = disc.apply(x) - rhs
    u, p = disc.unpack(x)
    info = {
        "method": "gmres",
        "iterations": iters[0],
        "residual": float(np.linalg.norm(res) / max(np.linalg.norm(rhs), 1e-300)),
    }
    return BumpyChannelSolution(disc, u, p, info=info)


# ---- reference fields ---------------------------------------------------


def _halfspace_at_heights(solution, heights, wall):
    """Evaluate a half-space solution at per-column heights.

    heights is an (n, n) array of physical x3 >= wall; the solution's own
    wall sits at x3 = wall, so mode profiles use x3 - wall. Heights vary
    with the horizontal point, which rules out a single inverse FFT; the
    Fourier sum is evaluated directly instead.
    """
    n = solution.n
    period = solution.period
    x = np.arange(n) * (period / n)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    kx, ky = freq_lattice(n, period)
    mask = np.ones((n, n), dtype=bool)
    mask[0, 0] = False
    kxm, kym = kx[mask], ky[mask]
    phases = np.exp(
        1j * (np.outer(xx.ravel(), kxm) + np.outer(yy.ravel(), kym))
    )  # (points, modes)
    depth = heights.ravel()[:, None] - wall
    batch = solution._batch
    out = np.zeros((3, xx.size), dtype=complex)
    for k in range(3):
        weight = batch["vel_cols"][:, k, :] * solution._amps[k][None, :]  # (3, m)
        damp = np.exp(-batch["lam"][k][None, :] * depth) * phases
        out += weight @ damp.T
    zero = solution.ekman.velocity(heights.ravel() - wall)  # (points, 3)
    out += zero.T
    return out.real.reshape(3, n, n)


def halfspace_restriction_data(geometry, trace, margin=0.25):
    """Exact bumpy-channel reference built from a deeper half-space solve.

    The half-space problem with wall at min(omega) - margin is solved for
    the given trace; restricted to the channel it satisfies the interior
    equations and the transparent top condition exactly, so its restriction
    to the bump surface is admissible bottom data and the field itself is an
    exact solution to compare against. Returns a dict with the bottom
    samples, the half-space solution, and its wall height.
    """
    wall = float(np.min(geometry.omega)) - margin
    upper = HalfspaceSolution(trace)
    bottom = _halfspace_at_heights(upper, geometry.omega, wall)
    return {"bottom": bottom, "solution": upper, "wall": wall}


def reference_node_values(data, discretization):
    """Sample the halfspace_restriction_data field on the sigma-nodes."""
    upper, wall = data["solution"], data["wall"]
    hts = discretization.heights()
    return np.stack(
        [
            _halfspace_at_heights(upper, hts[j], wall)
            for j in range(discretization.nv)
        ],
        axis=1,
    )


# ---- manufactured trigonometric fields ----------------------------------


@dataclass(frozen=True)
class TrigField:
    """Finite sum of separable cosine products, closed under derivatives.

    Each term is amp * cos(k1 x1 + p1) cos(k2 x2 + p2) cos(k3 x3 + p3);
    differentiating multiplies the amplitude by the wavenumber and shifts
    the matching phase by pi/2, so curls, Laplacians and forcings of
    manufactured solutions stay exact.
    """

    terms: tuple

    def __call__(self, x1, x2, x3):
        out = 0.0
        for amp, k1, k2, k3, p1, p2, p3 in self.terms:
            out = out + amp * (
                np.cos(k1 * x1 + p1) * np.cos(k2 * x2 + p2) * np.cos(k3 * x3 + p3)
            )
        return out

    def dx(self, axis):
        moved = []
        for amp, k1, k2, k3, p1, p2, p3 in self.terms:
            k = (k1, k2, k3)[axis]
            ph = [p1, p2, p3]
            ph[axis] += 0.5 * np.pi
            moved.append((amp * k, k1, k2, k3, ph[0], ph[1], ph[2]))
        return TrigField(tuple(moved))

    def laplacian(self):
        return self.dx(0).dx(0) + self.dx(1).dx(1) + self.dx(2).dx(2)

    def __add__(self, other):
        return TrigField(self.terms + other.terms)

    def __neg__(self):
        return TrigField(tuple((-t[0],) + t[1:] for t in self.terms))

    def __sub__(self, other):
        return self + (-other)

    @classmethod
    def random(cls, period, rng, nterms=2, kmax=2, kz_scale=1.0):
        w = 2.0 * np.pi / period
        terms = []
        for _ in range(nterms):
            k1, k2 = rng.integers(-kmax, kmax + 1, size=2)
            if k1 == 0 and k2 == 0:
                k1 = 1
            terms.append(
                (
                    rng.uniform(0.5, 1.0) * rng.choice([-1.0, 1.0]),
                    w * k1,
                    w * k2,
                    kz_scale * rng.uniform(0.5, 1.5),
                    rng.uniform(0.0, 2.0 * np.pi),
                    rng.uniform(0.0, 2.0 * np.pi),
                    rng.uniform(0.0, 2.0 * np.pi),
                )
            )
        return cls(tuple(terms))


@dataclass(frozen=True)
class ManufacturedSolution:
    """Divergence-free velocity, pressure, and the forcing they satisfy."""

    u: tuple
    p: TrigField
    f: tuple

    def velocity_values(self, x1, x2, x3):
        return np.stack([c(x1, x2, x3) for c in self.u])

    def forcing_values(self, x1, x2, x3):
        return np.stack([c(x1, x2, x3) for c in self.f])

    def pressure_values(self, x1, x2, x3):
        return self.p(x1, x2, x3)


def manufactured_solution(period, seed=0):
    """Random curl-based manufactured solution for the channel equations."""
    rng = np.random.default_rng(seed)
    psi = tuple(TrigField.random(period, rng) for _ in range(3))
    u = (
        psi[2].dx(1) - psi[1].dx(2),
        psi[0].dx(2) - psi[2].dx(0),
        psi[1].dx(0) - psi[0].dx(1),
    )
    p = TrigField.random(period, rng, nterms=1)
    rot = (-u[1], u[0])
    f = (
        -u[0].laplacian() + rot[0] + p.dx(0),
        -u[1].laplacian() + rot[1] + p.dx(1),
        -u[2].laplacian() + p.dx(2),
    )
    return ManufacturedSolution(u=u, p=p, f=f)


def manufactured_problem(discretization, mms):
    """Discrete problem data reproducing a manufactured solution.

    Returns (bottom, forcing, top_forcing, exact_nodes): the bottom trace on
    the bump surface, the momentum forcing at the nodes, the inhomogeneity
    of the transparent top rows (the manufactured field does not satisfy
    transparency, so its mismatch moves to the right-hand side), and the
    exact velocity at the nodes for error measurement.
    """
    disc = discretization
    x = np.arange(disc.n) * (disc.period / disc.n)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    hts = disc.heights()
    exact = np.stack(
        [mms.velocity_values(xx, yy, hts[j]) for j in range(disc.nv)], axis=1
    )
    forcing = np.stack(
        [mms.forcing_values(xx, yy, hts[j]) for j in range(disc.nv)], axis=1
    )
    bottom = exact[:, 0]
    top = exact[:, -1]
    zero = np.zeros_like(xx)
    d3u = np.stack([c.dx(2)(xx, yy, zero) for c in mms.u])
    top_forcing = -d3u - disc.dtn_grid_apply(top)
    top_forcing[2] += mms.pressure_values(xx, yy, zero)
    return bottom, forcing, top_forcing, exact


# ---- weak-form diagnostics ----------------------------------------------


def admissible_test_field(discretization, seed=0):
    """Divergence-free test field vanishing on the bottom surface.

    Built as curl(chi^2 a) with chi = x3 - omega(x_h) (equal to eta * sigma
    in flattened coordinates) and a random trigonometric a; the squared
    cutoff makes the curl vanish identically on the bump. Returns samples
    on the sigma-nodes, shape (3, nv, n, n).
    """
    disc = discretization
    rng = np.random.default_rng(seed)
    a = tuple(TrigField.random(disc.period, rng) for _ in range(3))
    x = np.arange(disc.n) * (disc.period / disc.n)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    hts = disc.heights()
    d1, d2 = disc.geometry.eta_gradients()
    out = np.empty((3, disc.nv, disc.n, disc.n))
    for j in range(disc.nv):
        x3 = hts[j]
        chi = disc.eta * disc.sigma[j]
        av = np.stack([c(xx, yy, x3) for c in a])
        curl = np.stack(
            [
                (a[2].dx(1) - a[1].dx(2))(xx, yy, x3),
                (a[0].dx(2) - a[2].dx(0))(xx, yy, x3),
                (a[1].dx(0) - a[0].dx(1))(xx, yy, x3),
            ]
        )
        # gradient of chi is (d1 eta, d2 eta, 1)
        gchi = np.stack([d1, d2, np.ones_like(d1)])
        cross = np.cross(gchi, av, axisa=0, axisb=0).transpose(2, 0, 1)
        out[:, j] = chi**2 * curl + 2.0 * chi * cross
    return out


def weak_residual(solution, phi, bottom, forcing=None, top_forcing=None):
    """Discrete residual paired against an admissible test field.

    Momentum rows integrate against phi over the channel volume (the
    flattening Jacobian is eta), the transparent rows against the top trace
    of phi; continuity rows are paired with the vertical component as a
    stand-in pressure test. For a converged solve every pairing sits at the
    Krylov tolerance; the normalization makes the scale of phi and of the
    data drop out.
    """
    disc = solution.discretization
    state = disc.pack(solution.u, solution.p)
    rhs = disc.assemble_rhs(bottom, forcing, top_forcing)
    ru, rp = disc.unpack(disc.apply(state) - rhs)
    cell = (disc.period / disc.n) ** 2
    wvol = disc.h * disc.eta * cell
    mom = float(np.sum(ru[:, 1 : disc.J] * phi[:, 1 : disc.J] * wvol))
    top = float(np.sum(ru[:, disc.J] * phi[:, disc.J]) * cell)
    mid_phi3 = 0.5 * (phi[2, 1:] + phi[2, :-1])
    cont = float(np.sum(rp * mid_phi3 * wvol))
    scale = max(float(np.max(np.abs(phi))), 1e-300) * max(
        float(np.max(np.abs(bottom))), 1e-300
    )
    vol = disc.period**2 * disc.geometry.mean_depth
    return {
        "momentum": mom / (scale * vol),
        "top": top / (scale * disc.period**2),
        "continuity": cont / (scale * vol),
    }


def channel_dirichlet_energy(solution):
    """Quadrature of the full velocity-gradient energy over the channel.

    Horizontal derivatives are pseudo-spectral with the sigma correction,
    vertical ones staggered onto midcells; the trapezoidal rule in sigma
    with Jacobian eta integrates |grad u|^2 over the physical cell.
    """
    disc = solution.discretization
    u = solution.u
    J = disc.J
    cell = (disc.period / disc.n) ** 2
    total = 0.0
    # vertical derivatives on midcells, where the staggered difference is
    # second order; horizontal terms use the node values averaged there
    for c in range(3):
        uc = u[c]
        dvert = np.diff(uc, axis=0) / disc.h * disc.inv_eta
        total += np.sum(dvert**2 * disc.eta) * disc.h * cell
        for i in (0, 1):
            dnode = disc.spec.dx(uc, i) + (
                disc.bnode[:, None, None] * disc.gcoef[i]
            ) * _dsigma_nodes(uc, disc.h)
            dmid = 0.5 * (dnode[1:] + dnode[:-1])
            total += np.sum(dmid**2 * disc.eta) * disc.h * cell
    return float(total)


def _dsigma_nodes(uc, h):
    """Second-order d_sigma at the nodes, one-sided at both ends."""
    out = np.empty_like(uc)
    out[1:-1] = (uc[2:] - uc[:-2]) / (2.0 * h)
    out[0] = (-3.0 * uc[0] + 4.0 * uc[1] - uc[2]) / (2.0 * h)
    out[-1] = (3.0 * uc[-1] - 4.0 * uc[-2] + uc[-3]) / (2.0 * h)
    return out

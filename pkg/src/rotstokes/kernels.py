"""Real-space decay of the solution-operator and remainder kernels.

Symbols are sampled on the frequency lattice of a large torus and inverted
with the FFT; kernels are then reduced to radial envelopes (max magnitude
over log-spaced annuli) and the envelope slope is fitted over a window well
inside the half period. The families checked:

  psi1      sum_k phi (M_k - M_k^1) e^{-lambda_k x3}, the horizontal-data
            solution kernels with their order-one parts removed
  psi2      same for the vertical-data kernels N_k = i (L_k e3) xi^T routed
            through the horizontal potential
  K_rem 1-4 the four blocks of the cutoff low-frequency symbol remainder
  M_rem_HF  (1 - phi)(M_SC - M_S - Mbar), the high-frequency remainder

All decay like |x|^-3 horizontally. The order-one parts M_k^1, N_k^1 are not
hard-coded: each matrix entry is expanded at low frequency by Richardson
extrapolation along rays and the leading radial powers are projected onto the
angular span {cos^2, sin cos, sin^2, cos, sin}; the reconstruction is what
gets subtracted. phi-supported symbols live on |xi| <= 2, so they are only
evaluated on that lattice disk; the high-frequency family needs every lattice
frequency and is evaluated in chunks through the batched assembly path.
"""

import numpy as np

from .dtn import MBAR_H, cutoff_phi, dtn_symbol_batch
from .fields import freq_lattice, freq_values
from .halfspace import assemble_batch

FIT_RMIN = 2.0
FIT_RMAX = 100.0
FIT_BINS = 24

_BIN_CACHE = {}


def torus_radii(n, period):
    """Distance to the origin with wraparound, (n, n)."""
    x = np.arange(n) * (period / n)
    x = np.minimum(x, period - x)
    return np.hypot(x[:, None], x[None, :])


def smooth_rolloff(s, start, stop):
    """C-infinity taper: 1 below start, 0 above stop, smooth step between.

    Used to truncate slowly decaying symbols before the lattice Nyquist
    square; a hard cutoff would ring at |x|^-1.5 and bury the kernel decay.
    """
    s = np.asarray(s, dtype=float)
    t = np.clip((s - start) / (stop - start), 0.0, 1.0)
    g = np.zeros_like(t)
    gm = np.zeros_like(t)
    pos = t > 0.0
    g[pos] = np.exp(-1.0 / t[pos])
    neg = t < 1.0
    gm[neg] = np.exp(-1.0 / (1.0 - t[neg]))
    return gm / (g + gm)


def kernel_from_symbol(grid, period):
    """Real-space kernel of a lattice-sampled symbol: Re ifft2 * n^2 / T^2."""
    n = grid.shape[-1]
    return np.real(np.fft.ifft2(grid)) * (n * n / period**2)


def _annulus_bins(n, period, rmin, rmax, nbins):
    key = (n, period, rmin, rmax, nbins)
    if key not in _BIN_CACHE:
        rr = torus_radii(n, period).ravel()
        edges = np.geomspace(rmin, rmax, nbins + 1)
        idx = np.searchsorted(edges, rr, side="right") - 1
        inside = (idx >= 0) & (idx < nbins)
        centers = np.sqrt(edges[:-1] * edges[1:])
        _BIN_CACHE[key] = (idx[inside], np.flatnonzero(inside), centers)
    return _BIN_CACHE[key]


def radial_envelope(values, period, rmin=FIT_RMIN, rmax=FIT_RMAX, nbins=FIT_BINS):
    """Max |kernel| per log-spaced annulus; returns (r_centers, envelope)."""
    n = values.shape[-1]
    idx, flat, centers = _annulus_bins(n, period, rmin, rmax, nbins)
    env = np.zeros(nbins)
    np.maximum.at(env, idx, np.abs(values.ravel()[flat]))
    return centers, env


def merge_envelopes(envelopes):
    out = envelopes[0].copy()
    for e in envelopes[1:]:
        out = np.maximum(out, e)
    return out


def decay_exponent(centers, envelope):
    """Least-squares slope of the envelope on log-log axes."""
    keep = envelope > 0.0
    return float(
        np.polyfit(np.log10(centers[keep]), np.log10(envelope[keep]), 1)[0]
    )


def family_envelope(kernels, period, rmin=FIT_RMIN, rmax=FIT_RMAX, nbins=FIT_BINS):
    """Entrywise-max envelope of a kernel family and its fitted exponent."""
    envs = [radial_envelope(k, period, rmin, rmax, nbins)[1] for k in kernels]
    centers = _annulus_bins(kernels[0].shape[-1], period, rmin, rmax, nbins)[2]
    merged = merge_envelopes(envs)
    return decay_exponent(centers, merged), (centers, merged)


# ---------------------------------------------------------------------------
# low-frequency expansion of symbol entries along rays

ANGULAR_POWERS = ((2, 0), (1, 1), (0, 2), (1, 0), (0, 1))


def _angular_design(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([c**pc * s**ps for pc, ps in ANGULAR_POWERS], axis=-1)


def lowfreq_expansion(entry_fn, powers=(-1, 0, 1), h=2e-3, nangles=64):
    """Expand entry_fn(xi) ~ sum_p s^p a_p(theta) at low frequency.

    entry_fn maps stacked frequencies (m, 2) to complex values (m,). Four
    Richardson nodes s = h / 2^q fix the radial powers; each a_p is then
    least-squares projected onto the angular span. Returns (coeffs, resid):
    coeffs has shape (len(powers), 5) and resid is the worst reconstruction
    error over the sample rays at s = h.
    """
    theta = 2.0 * np.pi * (np.arange(nangles) + 0.31) / nangles
    scales = h / 2.0 ** np.arange(len(powers) + 1)
    rays = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    xi = (scales[:, None, None] * rays[None, :, :]).reshape(-1, 2)
    vals = np.asarray(entry_fn(xi)).reshape(len(scales), nangles)
    t = scales / h
    vander = np.stack([t**p for p in powers], axis=-1)
    radial, *_ = np.linalg.lstsq(vander, vals, rcond=None)
    radial /= h ** np.array(powers, dtype=float)[:, None]
    design = _angular_design(theta)
    coeffs = np.linalg.lstsq(design, radial.T, rcond=None)[0].T
    recon = expansion_eval(coeffs, powers, scales[0] * rays)
    resid = float(np.max(np.abs(vals[0] - recon)))
    return coeffs, resid


def expansion_eval(coeffs, powers, xi):
    """Evaluate a lowfreq_expansion reconstruction at frequencies (m, 2)."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    s = np.hypot(xi[:, 0], xi[:, 1])
    theta = np.arctan2(xi[:, 1], xi[:, 0])
    design = _angular_design(theta)
    out = np.zeros(xi.shape[0], dtype=complex)
    for p, row in zip(powers, coeffs):
        out += s**p * (design @ row)
    return out


# ---------------------------------------------------------------------------
# symbol families

def solution_matrices(xi1, xi2):
    """Per-mode solution matrices L_k = c_k row_k(W), shape (3, 3, 3, m).

    u-hat(x3) = sum_k e^{-lambda_k x3} L_k v0-hat; index order is
    (mode, row, column, frequency). Also returns the batch dict.
    """
    b = assemble_batch(xi1, xi2)
    return np.einsum("ikm,mkj->kijm", b["vel_cols"], b["weights"]), b


def _entry_fn_solution(k, i, j):
    def fn(xi):
        mats, _ = solution_matrices(xi[:, 0], xi[:, 1])
        return mats[k, i, j]

    return fn


def _entry_fn_potential(k, i, j):
    def fn(xi):
        mats, _ = solution_matrices(xi[:, 0], xi[:, 1])
        return 1j * mats[k, i, 2] * xi[:, j]

    return fn


def _support_mask(n, period, band=2.0):
    kx, ky = freq_lattice(n, period)
    kk = np.hypot(kx, ky)
    mask = (kk <= band) & (kk > 0.0)
    return mask, kx[mask], ky[mask], kk[mask]


def psi_family(n, period, which, x3=0.0):
    """The six horizontal kernels of psi1 (which=1) or psi2 (which=2).

    Returns a list of (n, n) real kernels, rows i in 0..2 and columns j in
    0..1 of sum_k phi (family_k - family_k^1) e^{-lambda_k x3}.
    """
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    mask, kx, ky, kk = _support_mask(n, period)
    mats, batch = solution_matrices(kx, ky)
    phi = cutoff_phi(kk)
    damp = np.exp(-batch["lam"] * x3)
    kernels = []
    for i in range(3):
        for j in range(2):
            total = np.zeros(mask.shape, dtype=complex)
            acc = np.zeros(kx.shape, dtype=complex)
            for k in range(3):
                if which == 1:
                    fn = _entry_fn_solution(k, i, j)
                    raw = mats[k, i, j]
                else:
                    fn = _entry_fn_potential(k, i, j)
                    raw = 1j * mats[k, i, 2] * (kx if j == 0 else ky)
                coeffs, _ = lowfreq_expansion(fn)
                recon = expansion_eval(
                    coeffs, (-1, 0, 1), np.stack([kx, ky], axis=-1)
                )
                acc += phi * (raw - recon) * damp[k]
            total[mask] = acc
            kernels.append(kernel_from_symbol(total, period))
    return kernels


def lowfreq_remainder_families(n, period):
    """Kernels of the four cutoff low-frequency remainder blocks.

    Returns a dict: 1 -> four horizontal-block kernels, 2 -> two vertical
    column kernels, 3 -> two vertical row kernels, 4 -> the corner kernel.
    """
    mask, kx, ky, kk = _support_mask(n, period)
    full = dtn_symbol_batch(kx, ky)
    phi = cutoff_phi(kk)

    rem = np.empty_like(full)
    # M_S, Mbar and the order-one block, batched
    s = kk
    rem[0, 0] = full[0, 0] - (s + kx * kx / s) - MBAR_H[0, 0] - s * (-1.5)
    rem[0, 1] = full[0, 1] - (kx * ky / s) - MBAR_H[0, 1] - s * 0.5
    rem[1, 0] = full[1, 0] - (kx * ky / s) - MBAR_H[1, 0] - s * (-0.5)
    rem[1, 1] = full[1, 1] - (s + ky * ky / s) - MBAR_H[1, 1] - s * (-1.5)
    sq2 = np.sqrt(2.0)
    rem[0, 2] = full[0, 2] - 1j * kx - 1j * sq2 / (2 * s) * (kx + ky)
    rem[1, 2] = full[1, 2] - 1j * ky - 1j * sq2 / (2 * s) * (ky - kx)
    rem[2, 0] = full[2, 0] + 1j * kx - 1j * sq2 / (2 * s) * (ky - kx)
    rem[2, 1] = full[2, 1] + 1j * ky - 1j * sq2 / (2 * s) * (-kx - ky)
    rem[2, 2] = full[2, 2] - 2.0 * s - 1.0 / s

    corner_limit = None
    out = {1: [], 2: [], 3: [], 4: []}
    for i in range(3):
        for j in range(3):
            block = 1 if (i < 2 and j < 2) else 2 if j == 2 and i < 2 else (
                3 if i == 2 and j < 2 else 4
            )
            grid = np.zeros(mask.shape, dtype=complex)
            grid[mask] = phi * rem[i, j]
            if block == 4:
                if corner_limit is None:
                    tiny = dtn_symbol_batch([1e-6], [0.0])[2, 2, 0]
                    corner_limit = tiny - 2e-6 - 1e6
                grid[0, 0] = corner_limit
            out[block].append(kernel_from_symbol(grid, period))
    return out


def highfreq_rows(n, period, chunk=1 << 18):
    """Stream the high-frequency remainder kernels one symbol row at a time.

    Yields (i, [kernel_i0, kernel_i1, kernel_i2]). Evaluation covers every
    lattice frequency through the batched assembly path (this is the hot
    loop the compiled backend accelerates), in chunks to bound memory. The
    symbol decays like 1/|xi| and is tapered smoothly before the Nyquist
    square so truncation ringing stays below the kernel tail.
    """
    f = freq_values(n, period)
    nyquist = np.pi * n / period
    for i in range(3):
        grids = [np.zeros((n, n), dtype=complex) for _ in range(3)]
        for start in range(0, n, max(1, chunk // n)):
            stop = min(n, start + max(1, chunk // n))
            kx = np.repeat(f[start:stop], n)
            ky = np.tile(f, stop - start)
            kk = np.hypot(kx, ky)
            live = kk > 0.0
            sym = dtn_symbol_batch(kx[live], ky[live])
            one_minus_phi = (1.0 - cutoff_phi(kk[live])) * smooth_rolloff(
                kk[live], 0.4 * nyquist, 0.9 * nyquist
            )
            s = kk[live]
            for j in range(3):
                if i < 2 and j < 2:
                    stokes = (s if i == j else 0.0) + (
                        (kx if i == 0 else ky)[live]
                        * (kx if j == 0 else ky)[live]
                        / s
                    )
                    mbar = MBAR_H[i, j]
                elif i == 2 and j == 2:
                    stokes, mbar = 2.0 * s, 0.0
                elif j == 2:
                    stokes, mbar = 1j * (kx if i == 0 else ky)[live], 0.0
                else:
                    stokes, mbar = -1j * (kx if j == 0 else ky)[live], 0.0
                vals = np.zeros(kx.shape, dtype=complex)
                vals[live] = one_minus_phi * (sym[i, j] - stokes - mbar)
                grids[j][start:stop] += vals.reshape(stop - start, n)
        yield i, [kernel_from_symbol(g, period) for g in grids]


def mode_weight_kernels(n, period, x3):
    """Kernels of phi e^{-lambda_k x3} for the three decaying modes."""
    mask, kx, ky, kk = _support_mask(n, period)
    b = assemble_batch(kx, ky)
    phi = cutoff_phi(kk)
    out = []
    for k in range(3):
        grid = np.zeros(mask.shape, dtype=complex)
        grid[mask] = phi * np.exp(-b["lam"][k] * x3)
        lam0 = (0.0, np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4))[k]
        grid[0, 0] = np.exp(-lam0 * x3)
        out.append(kernel_from_symbol(grid, period))
    return out

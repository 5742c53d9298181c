"""Periodic lattices, boundary traces, and sampled fields.

Spectra are stored as Fourier coefficients: for a real grid function v on an
n x n lattice over the square torus of period T,

    spec = fft2(v) / n**2,   v(x) = sum_k spec_k e^{i xi_k . x_h},

with xi_k = (2 pi / T) k in numpy fft ordering. Horizontal derivatives are the
multipliers i xi_k. After applying a complex matrix multiplier, even-n Nyquist
rows (which have no conjugate partner on the lattice) are projected back to
their Hermitian part so inverse transforms stay exactly real; band-limited
data never touches those rows.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import CompatibilityError

#: relative tolerance on the mean of vertical boundary data
MEAN_ZERO_TOL = 1e-12


def freq_values(n, period):
    """1-D frequency values 2 pi k / T in fft order."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=period / n)


def freq_lattice(n, period):
    """Meshed (XI1, XI2), each (n, n), indexed [k1, k2] in fft order."""
    f = freq_values(n, period)
    return np.meshgrid(f, f, indexing="ij")


def grid_points(n, period):
    return np.arange(n) * (period / n)


def spec_of(values):
    """Fourier coefficients of a real grid function (last two axes)."""
    n = values.shape[-1]
    return np.fft.fft2(values) / (n * n)


def hermitianize(spec):
    """Project onto the Hermitian-symmetric part: spec_k := conj(spec_{-k}).

    Exact identity for spectra of real fields; after complex multipliers it
    repairs the partner-less Nyquist rows (and only alters what cannot be
    represented by a real field).
    """
    flipped = np.flip(np.roll(spec, -1, axis=(-2, -1)), axis=(-2, -1))
    return 0.5 * (spec + np.conj(flipped))


def values_of(spec):
    """Real grid function with the given Fourier coefficients."""
    n = spec.shape[-1]
    v = np.fft.ifft2(hermitianize(spec) * (n * n))
    return np.ascontiguousarray(v.real)


def band_limit_mask(n, period, xi_max):
    xx, yy = freq_lattice(n, period)
    return np.hypot(xx, yy) <= xi_max


@dataclass
class BoundaryTrace:
    """Velocity data on the interface x3 = 0 of a periodic half-space.

    v0: (3, n, n) real samples. The vertical component must have zero mean
    (the vertical symbol carries a 1/|xi| singularity); its horizontal
    potential U_h with div_h U_h = v0_3 is the canonical spectral inversion
    U_h-hat = -i xi v0_3-hat / |xi|^2.
    """

    period: float
    v0: np.ndarray
    spectrum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.v0 = np.asarray(self.v0, dtype=float)
        if self.v0.ndim != 3 or self.v0.shape[0] != 3 or self.v0.shape[1] != self.v0.shape[2]:
            raise ValueError("trace must have shape (3, n, n)")
        if not np.isfinite(self.period) or self.period <= 0:
            raise ValueError("period must be positive")
        scale = max(np.max(np.abs(self.v0[2])), 1.0)
        mean3 = abs(np.mean(self.v0[2]))
        if mean3 > MEAN_ZERO_TOL * scale:
            raise CompatibilityError(
                "vertical trace component has mean %g (tolerance %g); "
                "the transparent operator is singular on constants" % (mean3, MEAN_ZERO_TOL * scale)
            )
        self.spectrum = spec_of(self.v0)

    @property
    def n(self):
        return self.v0.shape[-1]

    def potential(self):
        """Horizontal potential U_h (2, n, n) with div_h U_h = v0_3."""
        xx, yy = freq_lattice(self.n, self.period)
        s2 = xx * xx + yy * yy
        s2[0, 0] = 1.0  # zero mode excluded; coefficient forced to 0 below
        w = self.spectrum[2] / s2
        uh = np.stack([-1j * xx * w, -1j * yy * w])
        uh[:, 0, 0] = 0.0
        return values_of(uh)

    @classmethod
    def random(cls, n, period, seed, kmax=3, amplitude=1.0):
        """Seeded band-limited trace: integer modes |k_i| <= kmax."""
        rng = np.random.default_rng(seed)
        spec = np.zeros((3, n, n), dtype=complex)
        ks = list(range(-kmax, kmax + 1))
        for c in range(3):
            for k1 in ks:
                for k2 in ks:
                    z = rng.standard_normal() + 1j * rng.standard_normal()
                    spec[c, k1 % n, k2 % n] = z
        spec = hermitianize(spec)
        spec[2, 0, 0] = 0.0
        v0 = values_of(spec)
        peak = np.max(np.abs(v0))
        if peak > 0:
            v0 *= amplitude / peak
        return cls(period=period, v0=v0)


@dataclass
class FieldGrid:
    """Velocity/pressure sampled on horizontal lattices at a set of heights."""

    period: float
    x3: np.ndarray
    velocity: np.ndarray  # (L, 3, n, n)
    pressure: np.ndarray  # (L, n, n)

    def __post_init__(self):
        self.x3 = np.asarray(self.x3, dtype=float)
        self.velocity = np.asarray(self.velocity, dtype=float)
        self.pressure = np.asarray(self.pressure, dtype=float)
        if self.velocity.shape[0] != self.x3.size or self.pressure.shape[0] != self.x3.size:
            raise ValueError("level count mismatch between x3 and field arrays")

    @property
    def n(self):
        return self.velocity.shape[-1]

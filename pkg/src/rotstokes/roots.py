"""Vertical decay exponents for the rotating Stokes half-space.

Fourier modes e^{i xi . x_h} of the stationary system

    -Delta u + e3 x u + grad p = 0,   div u = 0,   x3 > 0

decay like e^{-lambda x3} where lambda solves the characteristic sextic

    (lambda^2 - |xi|^2)^3 + lambda^2 = 0.

Exactly three roots have positive real part: one real root lambda1 and a
conjugate pair lambda2 = conj(lambda3) with Im(lambda2) > 0. Substituting
mu = lambda^2 turns the sextic into a cubic; writing g = |xi|^2 - mu (the
"gap" between the root and the non-rotating value |xi|) gives the cleaner
cubic g^3 + g = |xi|^2, from which the exact relations

    g1 + g2 + g3 = 0,   g1 g2 + g2 g3 + g3 g1 = 1,   g1 g2 g3 = |xi|^2,
    lambda_k^2 = g_k^3,   lambda1 lambda2 lambda3 = |xi|^3

all follow. The solver carries the gaps alongside the roots: they are the
quantities that admit a cancellation-free radical evaluation at every
frequency, and residuals formed through them stay at roundoff where naive
re-evaluation of the sextic loses five digits.
"""

from dataclasses import dataclass

import numpy as np

from . import _accel

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)
#: primitive cube root of unity
JCUBE = np.exp(2j * np.pi / 3.0)
#: Ekman spiral exponent e^{i pi/4}
EKMAN = np.exp(1j * np.pi / 4.0)


@dataclass(frozen=True)
class Frequency:
    """Horizontal Fourier frequency xi = (xi1, xi2)."""

    xi1: float
    xi2: float

    @classmethod
    def from_polar(cls, modulus, angle):
        return cls(modulus * np.cos(angle), modulus * np.sin(angle))

    @property
    def modulus(self):
        return float(np.hypot(self.xi1, self.xi2))

    @property
    def perp(self):
        """Rotation by +pi/2: (-xi2, xi1)."""
        return Frequency(-self.xi2, self.xi1)

    def as_array(self):
        return np.array([self.xi1, self.xi2], dtype=float)


def _as_modulus(xi):
    """Accept a Frequency, an (xi1, xi2) pair, or a bare modulus."""
    if isinstance(xi, Frequency):
        s = xi.modulus
    elif np.isscalar(xi):
        s = float(xi)
    else:
        arr = np.asarray(xi, dtype=float)
        if arr.shape != (2,):
            raise ValueError("frequency must be scalar modulus or length-2 vector")
        s = float(np.hypot(arr[0], arr[1]))
    if not np.isfinite(s) or s < 0:
        raise ValueError("frequency modulus must be finite and nonnegative, got %r" % s)
    return s


@dataclass(frozen=True)
class SpectralRoots:
    """The three decaying roots and their gaps g_k = |xi|^2 - lambda_k^2.

    lambda1 is real positive (zero only at xi = 0), lambda3 = conj(lambda2),
    Im(lambda2) > 0. Gaps are stored from the stable radical evaluation, not
    recomputed from the roots; fault-injection constructors recompute them
    naively on purpose.
    """

    lambda1: float
    lambda2: complex
    lambda3: complex
    gap1: complex
    gap2: complex
    gap3: complex

    @classmethod
    def from_lambdas(cls, lambda1, lambda2, lambda3, modulus):
        """Build from bare roots with naively evaluated gaps (for testing)."""
        s2 = float(modulus) ** 2
        return cls(
            lambda1=float(lambda1),
            lambda2=complex(lambda2),
            lambda3=complex(lambda3),
            gap1=s2 - complex(lambda1) ** 2,
            gap2=s2 - complex(lambda2) ** 2,
            gap3=s2 - complex(lambda3) ** 2,
        )

    def lambdas(self):
        return np.array([self.lambda1, self.lambda2, self.lambda3], dtype=complex)

    def gaps(self):
        return np.array([self.gap1, self.gap2, self.gap3], dtype=complex)


def characteristic_roots(xi):
    """Decaying roots of (lambda^2 - |xi|^2)^3 + lambda^2 = 0 at frequency xi.

    Closed radical form, stable at all finite frequencies:

        R   = sqrt(|xi|^4 + 4/27)
        c+  = ((|xi|^2 + R)/2)^(1/3)
        c-  = ((4/27) / (2(|xi|^2 + R)))^(1/3)      # rationalized
        D   = c+^2 + c+ c- + c-^2
        g1  = |xi|^2 / D                            # = c+ - c- without subtraction
        g2  = -g1/2 - i (sqrt3/2)(c+ + c-)
        lambda2 = sqrt(|xi|^2 - g2)  (principal branch)
        lambda1 = |xi|^3 / |lambda2|^2              # product relation

    The product form for lambda1 avoids the c+ - c- cancellation that costs
    ~|xi|^{-2} relative accuracy near zero frequency; the gap g1 equals
    c+ - c- analytically but is evaluated through D.

    At xi = 0 this returns lambda1 = 0 (the non-decaying translation mode)
    and lambda2 = e^{i pi/4}, the Ekman exponent.
    """
    s = _as_modulus(xi)
    l1, l2, l3, g1, g2, g3 = _accel.roots_batch(np.array([s]))
    return SpectralRoots(
        lambda1=float(l1[0]),
        lambda2=complex(l2[0]),
        lambda3=complex(l3[0]),
        gap1=complex(g1[0]),
        gap2=complex(g2[0]),
        gap3=complex(g3[0]),
    )


def roots_batch(moduli):
    """Vectorized characteristic_roots over an array of |xi| values.

    Returns (lambda1, lambda2, lambda3, gap1, gap2, gap3) arrays with the
    input's shape. Hot path: dispatches to the numba kernel when active.
    """
    s = np.asarray(moduli, dtype=float)
    if s.size and (not np.all(np.isfinite(s)) or np.any(s < 0)):
        raise ValueError("moduli must be finite and nonnegative")
    return _accel.roots_batch(s)


def characteristic_roots_oracle(xi):
    """Independent root evaluation through companion-matrix eigenvalues.

    Two substitutions reduce the sextic to a cubic, and each is solved as the
    eigenvalue problem of its companion matrix:

        mu = lambda^2:          mu^3 - 3|xi|^2 mu^2 + (3|xi|^4+1) mu - |xi|^6 = 0
        g  = |xi|^2 - lambda^2: g^3 + g - |xi|^2 = 0

    The gap cubic has O(1)-separated roots at every frequency, so its
    companion eigenvalues carry full relative accuracy; it feeds lambda2,
    lambda3 always and lambda1 above |xi| = 1. Below that the subtraction
    |xi|^2 - g1 ~ |xi|^6 would lose |xi|^{-4} digits, while the mu-companion
    keeps the tiny eigenvalue mu1 ~ |xi|^6 accurate (graded matrix), so
    lambda1 comes from sqrt(mu1) there. Neither path shares radical algebra
    with characteristic_roots. Returns all six sextic roots (three decaying
    and their negatives), unsorted.
    """
    s = _as_modulus(xi)
    s2 = s * s
    gap_comp = np.array(
        [[0.0, 0.0, s2], [1.0, 0.0, -1.0], [0.0, 1.0, 0.0]], dtype=complex
    )
    gaps = sorted(np.linalg.eigvals(gap_comp), key=lambda z: abs(z.imag))
    lam2 = np.sqrt(s2 - min(gaps[1:], key=lambda z: z.imag))
    lam3 = np.sqrt(s2 - max(gaps[1:], key=lambda z: z.imag))
    if s > 1.0:
        lam1 = np.sqrt(s2 - gaps[0])
    else:
        mu_comp = np.array(
            [
                [0.0, 0.0, s2 * s2 * s2],
                [1.0, 0.0, -(3.0 * s2 * s2 + 1.0)],
                [0.0, 1.0, 3.0 * s2],
            ],
            dtype=complex,
        )
        mus = np.linalg.eigvals(mu_comp)
        lam1 = np.sqrt(min(mus, key=lambda z: abs(z.imag)))
    out = []
    for r in (lam1, lam2, lam3):
        out.extend([r, -r])
    return out


def decaying_triple(roots6):
    """Sort six sextic roots into the decaying triple (lambda1, lambda2, lambda3).

    lambda1: the root with the smallest |Im| among Re > 0; lambda2/lambda3 the
    remaining pair ordered by sign of the imaginary part.
    """
    pos = [r for r in roots6 if r.real > 0 or (abs(r.real) < 1e-300 and abs(r) < 1e-100)]
    if len(pos) != 3:
        # xi = 0 has lambda1 = 0 sitting on the axis; pick the three with
        # largest real part as the decaying family
        pos = sorted(roots6, key=lambda r: -r.real)[:3]
    pos.sort(key=lambda r: abs(r.imag))
    lam1 = pos[0]
    rest = sorted(pos[1:], key=lambda r: -r.imag)
    return lam1, rest[0], rest[1]


def roots_asymptotic(xi, regime):
    """Truncated expansions of the decaying roots.

    regime "high": lambda_k = |xi| - c_k/(2 |xi|^{1/3}), c = (1, j^2, j) with
    j = e^{2 i pi/3}; error O(|xi|^{-5/3}).
    regime "low": lambda1 = |xi|^3 (error O(|xi|^7));
    lambda2 = e^{i pi/4} (1 - (3/4) i |xi|^2), from lambda2^2 = i + (3/2)|xi|^2
    (error O(|xi|^4)).
    """
    s = _as_modulus(xi)
    if regime == "high":
        if s <= 0:
            raise ValueError("high-frequency expansion needs |xi| > 0")
        f = 0.5 * s ** (-1.0 / 3.0)
        l1 = s - f
        l2 = s - f * JCUBE**2
        l3 = s - f * JCUBE
    elif regime == "low":
        l1 = s**3
        l2 = EKMAN * (1.0 - 0.75j * s * s)
        l3 = np.conj(l2)
    else:
        raise ValueError("regime must be 'high' or 'low', got %r" % (regime,))
    return SpectralRoots.from_lambdas(complex(l1).real, l2, l3, s)


def validate_root_relations(roots, xi):
    """Residuals of the four exact root relations, individually normalized.

    Keys:
      "branch":  Re(lambda_k) >= 0, lambda1 real, lambda3 = conj(lambda2)
                 (violation magnitude over max |lambda_k|, or absolute at xi=0)
      "product": |lambda1 lambda2 lambda3 - |xi|^3| / |xi|^3
      "gap":     gap cubic symmetric functions: sum = 0, pair sum = 1,
                 product = |xi|^2 (max of the three, each normalized)
      "sextic":  per-root |lambda_k^2 - gap_k^3| / max(|lambda_k|^2, |gap_k|^3)
      "max":     worst of the above

    The sextic residual is evaluated through the stored gaps; forming
    (lambda^2 - |xi|^2)^3 from the roots directly would reintroduce the
    cancellation the representation exists to avoid.
    """
    s = _as_modulus(xi)
    tiny = np.finfo(float).tiny
    lam = roots.lambdas()
    gap = roots.gaps()
    scale = max(np.max(np.abs(lam)), 1.0 if s == 0 else 0.0, tiny)

    branch = (
        abs(np.imag(complex(roots.lambda1)))
        + abs(roots.lambda3 - np.conj(roots.lambda2))
        + sum(max(0.0, -r.real) for r in lam)
    ) / scale

    s3 = s**3
    product = abs(lam[0] * lam[1] * lam[2] - s3) / max(s3, tiny)

    pairs = np.array([gap[0] * gap[1], gap[1] * gap[2], gap[2] * gap[0]])
    gsum = abs(gap.sum()) / max(np.max(np.abs(gap)), tiny)
    gpair = abs(pairs.sum() - 1.0) / max(np.max(np.abs(pairs)), 1.0)
    gprod = abs(gap[0] * gap[1] * gap[2] - s * s) / max(s * s, tiny)
    gap_res = max(gsum, gpair, gprod)

    sextic = 0.0
    for k in range(3):
        num = abs(lam[k] * lam[k] - gap[k] ** 3)
        den = max(abs(lam[k]) ** 2, abs(gap[k]) ** 3, tiny)
        sextic = max(sextic, num / den)

    out = {"branch": branch, "product": product, "gap": gap_res, "sextic": sextic}
    out["max"] = max(out.values())
    return out

"""Backend selection for the hot kernels.

Two interchangeable implementations exist for the inner loops (root sweeps
over large frequency lattices, batched 3x3 mode solves, mode-profile
evaluation over vertical levels): a vectorized numpy one and a numba-compiled
one. The active backend is chosen at import time from the environment
variable ROTSTOKES_NUMBA:

    ROTSTOKES_NUMBA=0   force the pure numpy fallback
    ROTSTOKES_NUMBA=1   require numba (ImportError if missing)
    unset / auto        use numba when importable, else numpy

Both paths produce identical results to float64 roundoff; tests assert
agreement at 1e-13. ``set_backend`` switches at runtime (used by the
benchmark script).
"""

import os

import numpy as np

_SQRT3 = np.sqrt(3.0)
_A27 = 4.0 / 27.0

_env = os.environ.get("ROTSTOKES_NUMBA", "auto").strip().lower()

if _env in ("0", "off", "false", "numpy"):
    _HAVE_NUMBA = False
else:
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _env in ("1", "on", "true", "numba"):
            raise
        _HAVE_NUMBA = False

HAS_NUMBA = _HAVE_NUMBA
_active = "numba" if _HAVE_NUMBA else "numpy"


def backend():
    """Name of the active backend, "numba" or "numpy"."""
    return _active


def set_backend(name):
    """Switch backends at runtime. Raises RuntimeError if numba was not importable."""
    global _active
    if name not in ("numba", "numpy"):
        raise ValueError("backend must be 'numba' or 'numpy', got %r" % (name,))
    if name == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    _active = name


def _roots_batch_numpy(s):
    """Vectorized decay exponents and gaps for an array of |xi| values.

    Returns (lam1, lam2, lam3, g1, g2, g3); lam1 real, lam2 in the upper
    half-plane, lam3 = conj(lam2), g_k = |xi|^2 - lam_k^2 evaluated in the
    cancellation-free radical form.
    """
    s = np.asarray(s, dtype=np.float64)
    s2 = s * s
    rad = np.sqrt(s2 * s2 + _A27)
    den = s2 + rad
    cp = np.cbrt(0.5 * den)
    cm = np.cbrt(_A27 / (2.0 * den))
    dq = cp * cp + cp * cm + cm * cm
    g1 = s2 / dq
    g2 = -0.5 * g1 - 1j * (0.5 * _SQRT3) * (cp + cm)
    lam2 = np.sqrt(s2 - g2)
    lam1 = s2 * s / (lam2.real * lam2.real + lam2.imag * lam2.imag)
    return lam1, lam2, np.conj(lam2), g1 + 0j, g2, np.conj(g2)


def _solve3_batch_numpy(mats, rhs):
    """Solve m independent 3x3 complex systems: mats (m,3,3), rhs (m,3,k)."""
    return np.linalg.solve(mats, rhs)


def _mode_profiles_numpy(lam, coeff, cols, x3):
    """Superpose decaying mode profiles over vertical levels.

    lam, coeff: (3, m); cols: (3, 3, m) mode velocity columns (component,
    mode, frequency); x3: (L,) nonnegative levels. Returns (L, 3, m).
    """
    ex = np.exp(-np.multiply.outer(x3, lam))  # (L, 3, m)
    w = ex * coeff[None, :, :]
    return np.einsum("ikm,lkm->lim", cols, w)


if _HAVE_NUMBA:

    @njit(cache=True)
    def _roots_batch_numba(s):
        n = s.shape[0]
        lam1 = np.empty(n, dtype=np.float64)
        lam2 = np.empty(n, dtype=np.complex128)
        lam3 = np.empty(n, dtype=np.complex128)
        g1 = np.empty(n, dtype=np.complex128)
        g2 = np.empty(n, dtype=np.complex128)
        g3 = np.empty(n, dtype=np.complex128)
        for i in range(n):
            si = s[i]
            s2 = si * si
            rad = np.sqrt(s2 * s2 + _A27)
            den = s2 + rad
            cp = (0.5 * den) ** (1.0 / 3.0)
            cm = (_A27 / (2.0 * den)) ** (1.0 / 3.0)
            dq = cp * cp + cp * cm + cm * cm
            gr = s2 / dq
            gg = complex(-0.5 * gr, -(0.5 * _SQRT3) * (cp + cm))
            l2 = np.sqrt(s2 - gg)
            lam1[i] = s2 * si / (l2.real * l2.real + l2.imag * l2.imag)
            lam2[i] = l2
            lam3[i] = np.conj(l2)
            g1[i] = complex(gr, 0.0)
            g2[i] = gg
            g3[i] = np.conj(gg)
        return lam1, lam2, lam3, g1, g2, g3

    @njit(cache=True)
    def _solve3_batch_numba(mats, rhs):
        m = mats.shape[0]
        k = rhs.shape[2]
        out = np.empty((m, 3, k), dtype=np.complex128)
        a = np.empty((3, 3), dtype=np.complex128)
        b = np.empty((3, k), dtype=np.complex128)
        for t in range(m):
            for i in range(3):
                for j in range(3):
                    a[i, j] = mats[t, i, j]
                for j in range(k):
                    b[i, j] = rhs[t, i, j]
            # Gaussian elimination with partial pivoting
            for col in range(2):
                piv = col
                best = abs(a[col, col])
                for r in range(col + 1, 3):
                    if abs(a[r, col]) > best:
                        best = abs(a[r, col])
                        piv = r
                if piv != col:
                    for j in range(3):
                        a[col, j], a[piv, j] = a[piv, j], a[col, j]
                    for j in range(k):
                        b[col, j], b[piv, j] = b[piv, j], b[col, j]
                for r in range(col + 1, 3):
                    f = a[r, col] / a[col, col]
                    for j in range(col, 3):
                        a[r, j] -= f * a[col, j]
                    for j in range(k):
                        b[r, j] -= f * b[col, j]
            for j in range(k):
                x2 = b[2, j] / a[2, 2]
                x1 = (b[1, j] - a[1, 2] * x2) / a[1, 1]
                x0 = (b[0, j] - a[0, 1] * x1 - a[0, 2] * x2) / a[0, 0]
                out[t, 0, j] = x0
                out[t, 1, j] = x1
                out[t, 2, j] = x2
        return out

    @njit(cache=True)
    def _mode_profiles_numba(lam, coeff, cols, x3):
        nl = x3.shape[0]
        m = lam.shape[1]
        out = np.zeros((nl, 3, m), dtype=np.complex128)
        for l in range(nl):
            for f in range(m):
                for k in range(3):
                    w = coeff[k, f] * np.exp(-x3[l] * lam[k, f])
                    for i in range(3):
                        out[l, i, f] += cols[i, k, f] * w
        return out


def roots_batch(s):
    """Dispatch the root sweep to the active backend. s: float array (any shape)."""
    s = np.ascontiguousarray(np.asarray(s, dtype=np.float64))
    shape = s.shape
    flat = s.ravel()
    if _active == "numba":
        parts = _roots_batch_numba(flat)
    else:
        parts = _roots_batch_numpy(flat)
    return tuple(p.reshape(shape) for p in parts)


def solve3_batch(mats, rhs):
    """Batched 3x3 complex solve on the active backend."""
    mats = np.ascontiguousarray(mats, dtype=np.complex128)
    rhs = np.ascontiguousarray(rhs, dtype=np.complex128)
    if _active == "numba":
        return _solve3_batch_numba(mats, rhs)
    return _solve3_batch_numpy(mats, rhs)


def mode_profiles(lam, coeff, cols, x3):
    """Batched mode-profile superposition on the active backend."""
    lam = np.ascontiguousarray(lam, dtype=np.complex128)
    coeff = np.ascontiguousarray(coeff, dtype=np.complex128)
    cols = np.ascontiguousarray(cols, dtype=np.complex128)
    x3 = np.ascontiguousarray(x3, dtype=np.float64)
    if _active == "numba":
        return _mode_profiles_numba(lam, coeff, cols, x3)
    return _mode_profiles_numpy(lam, coeff, cols, x3)

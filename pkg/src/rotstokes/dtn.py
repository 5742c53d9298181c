"""The transparent-boundary (Dirichlet-to-Neumann) operator.

For boundary data v0 on x3 = 0 the decaying half-space solution has wall
traction -d3 u + p e3; frequency by frequency this is a 3x3 matrix symbol
M_SC(xi) acting on v0-hat. This module evaluates M_SC, the flat non-rotating
comparison symbol M_S, the rotation (Ekman) limit Mbar, and the low/high
frequency decomposition

    M_SC = M_S + Mbar + (1 - phi) (M_SC - M_S - Mbar)
               + phi [[M1, V1], [V2^T, 1/|xi|]] + phi M_rem

with a radial cutoff phi supported in |xi| <= 2. The order-one block collects
the homogeneous degree-one / degree-minus-one parts that need a real-space
singular-integral representation; M_rem is O(|xi|^2) in its horizontal block.

Hermitian structure: Re <M_SC v, v> is the Dirichlet energy of the half-space
solution (the skew part is the rotation term), and the Hermitian part of
M_SC is positive semidefinite.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from .fields import BoundaryTrace, freq_lattice, values_of
from .halfspace import HalfspaceSolution, assemble_batch
from .roots import SQRT2

#: horizontal rotation-limit block: traction of the Ekman spiral per unit
#: horizontal mean velocity
MBAR_H = (SQRT2 / 2.0) * np.array([[1.0, -1.0], [1.0, 1.0]])

#: coefficient matrix of the order-one horizontal part M1 = (|xi|/2) * M1_COEF
M1_COEF = 0.5 * np.array([[-3.0, 1.0], [-1.0, -3.0]])


def cutoff_phi(s):
    """Radial cutoff: 1 on [0, 1], exp(1 - 1/(1 - (s-1)^2)) on (1, 2), 0 after.

    C^1 at s = 1 (the second derivative jumps), smooth at s = 2 from the left.
    Vectorized over s.
    """
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape)
    out[s <= 1.0] = 1.0
    mid = (s > 1.0) & (s < 2.0)
    t = s[mid] - 1.0
    out[mid] = np.exp(1.0 - 1.0 / (1.0 - t * t))
    return out if out.ndim else float(out)


def dtn_symbol_batch(xi1, xi2):
    """M_SC on arrays of nonzero frequencies: returns (3, 3, m)."""
    b = assemble_batch(xi1, xi2)
    return np.einsum("ikm,mkj->ijm", b["trac_cols"], b["weights"])


def dtn_symbol(xi):
    """The 3x3 transparent-boundary symbol at one frequency.

    At xi = 0 returns the Ekman limit diag(MBAR_H, 0), the continuous
    zero-frequency extension used by grid application.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (2,):
        raise ValueError("xi must be an (xi1, xi2) pair")
    if xi[0] == 0.0 and xi[1] == 0.0:
        out = np.zeros((3, 3), dtype=complex)
        out[:2, :2] = MBAR_H
        return out
    return dtn_symbol_batch([xi[0]], [xi[1]])[:, :, 0]


def dtn_symbol_stokes(xi):
    """The non-rotating comparison symbol M_S (flat Stokes half-space):

        [[|xi| + xi1^2/|xi|, xi1 xi2 /|xi|,    i xi1],
         [xi1 xi2 /|xi|,     |xi| + xi2^2/|xi|, i xi2],
         [-i xi1,            -i xi2,            2|xi|]]
    """
    x1, x2 = float(xi[0]), float(xi[1])
    s = np.hypot(x1, x2)
    if s == 0.0:
        raise ValueError("Stokes symbol is singular at xi = 0")
    return np.array(
        [
            [s + x1 * x1 / s, x1 * x2 / s, 1j * x1],
            [x1 * x2 / s, s + x2 * x2 / s, 1j * x2],
            [-1j * x1, -1j * x2, 2.0 * s],
        ],
        dtype=complex,
    )


def mbar_full():
    out = np.zeros((3, 3), dtype=complex)
    out[:2, :2] = MBAR_H
    return out


@dataclass(frozen=True)
class DtNSymbol:
    """Decomposed transparent symbol at one nonzero frequency.

    full = stokes + mbar + highfreq_rem + phi * (order_one + lowfreq_rem)
    where highfreq_rem = (1 - phi)(full - stokes - mbar), order_one is the
    block [[M1, V1], [V2^T, 1/|xi|]], and lowfreq_rem is the leftover with
    O(|xi|^2) horizontal block.
    """

    xi: np.ndarray
    full: np.ndarray
    stokes: np.ndarray
    mbar: np.ndarray
    phi: float
    order_one: np.ndarray
    highfreq_rem: np.ndarray
    lowfreq_rem: np.ndarray

    @property
    def modulus(self):
        return float(np.hypot(self.xi[0], self.xi[1]))

    def m1(self):
        """Order-one nonpolynomial horizontal block, (|xi|/2)[[-3,1],[-1,-3]]."""
        return self.modulus * M1_COEF.astype(complex)

    def v1(self):
        """Vertical-column order-one part: (i sqrt2 / (2|xi|)) (xi1+xi2, xi2-xi1)."""
        x1, x2 = self.xi
        return (1j * SQRT2 / (2.0 * self.modulus)) * np.array([x1 + x2, x2 - x1])

    def v2(self):
        """Vertical-row order-one part: (i sqrt2 / (2|xi|)) (xi2-xi1, -xi1-xi2)."""
        x1, x2 = self.xi
        return (1j * SQRT2 / (2.0 * self.modulus)) * np.array([x2 - x1, -x1 - x2])

    def m2(self):
        """V1 acting through the horizontal potential: V1 (i xi)^T, real entries."""
        return np.outer(self.v1(), 1j * self.xi)

    def m3(self):
        """Polynomial column against V2: -i xi V2^T, real entries."""
        return np.outer(-1j * self.xi, self.v2())

    def m4(self):
        """xi xi^T / |xi| (from the polynomial column through the potential)."""
        return np.outer(self.xi, self.xi).astype(complex) / self.modulus

    def recompose(self):
        return (
            self.stokes
            + self.mbar
            + self.highfreq_rem
            + self.phi * (self.order_one + self.lowfreq_rem)
        )


def dtn_decompose(xi):
    """Split M_SC(xi) into its named low/high-frequency parts."""
    xi = np.asarray(xi, dtype=float)
    s = float(np.hypot(xi[0], xi[1]))
    if s == 0.0:
        raise ValueError("decomposition is defined for nonzero frequencies")
    full = dtn_symbol(xi)
    stokes = dtn_symbol_stokes(xi)
    mbar = mbar_full()
    phi = float(cutoff_phi(s))
    order_one = np.zeros((3, 3), dtype=complex)
    order_one[:2, :2] = s * M1_COEF
    v1 = (1j * SQRT2 / (2.0 * s)) * np.array([xi[0] + xi[1], xi[1] - xi[0]])
    v2 = (1j * SQRT2 / (2.0 * s)) * np.array([xi[1] - xi[0], -xi[0] - xi[1]])
    order_one[:2, 2] = v1
    order_one[2, :2] = v2
    order_one[2, 2] = 1.0 / s
    diff = full - stokes - mbar
    return DtNSymbol(
        xi=xi,
        full=full,
        stokes=stokes,
        mbar=mbar,
        phi=phi,
        order_one=order_one,
        highfreq_rem=(1.0 - phi) * diff,
        lowfreq_rem=diff - order_one,
    )


def dtn_asymptotic(xi, regime):
    """Leading symbol behavior at one nonzero frequency.

    "high" returns M_S (relative error O(|xi|^-2)). "low" returns
    Mbar + M_S + the order-one block, plus the constant -sqrt2/2 the corner
    entry carries beyond 1/|xi|; the error is O(|xi|) entrywise, O(|xi|^2)
    in the horizontal block.
    """
    xi = np.asarray(xi, dtype=float)
    s = float(np.hypot(xi[0], xi[1]))
    if s == 0.0:
        raise ValueError("asymptotic forms need a direction")
    if regime == "high":
        return dtn_symbol_stokes(xi)
    if regime != "low":
        raise ValueError("regime must be 'high' or 'low'")
    out = mbar_full() + dtn_symbol_stokes(xi)
    out[:2, :2] += s * M1_COEF
    out[:2, 2] += (1j * SQRT2 / (2.0 * s)) * np.array([xi[0] + xi[1], xi[1] - xi[0]])
    out[2, :2] += (1j * SQRT2 / (2.0 * s)) * np.array([xi[1] - xi[0], -xi[0] - xi[1]])
    out[2, 2] += 1.0 / s - SQRT2 / 2.0
    return out


def _stencil_1d(order):
    # second-order central stencils for derivative orders 0..3
    if order == 0:
        return {0: 1.0}
    if order == 1:
        return {-1: -0.5, 1: 0.5}
    if order == 2:
        return {-1: 1.0, 0: -2.0, 1: 1.0}
    if order == 3:
        return {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5}
    raise ValueError("stencil order must be 0..3")


def dtn_remainder_derivatives(xi, order, step=None):
    """Entrywise max magnitude of order-|alpha| derivatives of M_SC - M_S.

    Central finite differences; mixed partials by tensor products of 1-D
    stencils. Returns the max over all multi-indices alpha with
    |alpha| = order of max_ij |d^alpha (M_SC - M_S)_ij|.

    Default step is max(1e-4, 1e-4 |xi|) for orders 1 and 2. Order 3 uses
    max(1e-3, 2e-2 |xi|): the third derivative decays like |xi|^-4 while the
    symbol itself grows like |xi|, so a stencil with step h carries a rounding
    floor near eps |xi| / h^3 that buries the signal past |xi| ~ 10 unless h
    grows proportionally to |xi|.
    """
    if order not in (1, 2, 3):
        raise ValueError("derivative order must be 1, 2, or 3")
    xi = np.asarray(xi, dtype=float)
    s = float(np.hypot(xi[0], xi[1]))
    if step is not None:
        h = step
    elif order == 3:
        h = max(1e-3, 2e-2 * s)
    else:
        h = max(1e-4, 1e-4 * s)

    def diff_at(p):
        return dtn_symbol(p) - dtn_symbol_stokes(p)

    worst = 0.0
    for a in range(order + 1):
        b = order - a
        st1, st2 = _stencil_1d(a), _stencil_1d(b)
        acc = np.zeros((3, 3), dtype=complex)
        for (o1, w1), (o2, w2) in product(st1.items(), st2.items()):
            acc += (w1 * w2) * diff_at(xi + h * np.array([o1, o2]))
        acc /= h**order
        worst = max(worst, float(np.max(np.abs(acc))))
    return worst


def dtn_apply(trace):
    """Wall traction field of the half-space solution with the given trace.

    Pure symbol multiplication: traction-hat = M_SC(xi) v0-hat per lattice
    frequency, Ekman limit at the zero mode. Returns (3, n, n) real samples.
    """
    if not isinstance(trace, BoundaryTrace):
        raise TypeError("dtn_apply expects a BoundaryTrace")
    n = trace.n
    xx, yy = freq_lattice(n, trace.period)
    mask = np.ones((n, n), dtype=bool)
    mask[0, 0] = False
    sym = dtn_symbol_batch(xx[mask], yy[mask])
    out = np.zeros((3, n, n), dtype=complex)
    out[:, mask] = np.einsum("ijm,jm->im", sym, trace.spectrum[:, mask])
    out[:2, 0, 0] = MBAR_H @ trace.spectrum[:2, 0, 0]
    return values_of(out)


def quadratic_form(trace):
    """Re <DtN v0, v0> integrated over the periodic cell.

    Equals the total Dirichlet energy of the decaying half-space solution.
    """
    if not isinstance(trace, BoundaryTrace):
        raise TypeError("quadratic_form expects a BoundaryTrace")
    n = trace.n
    xx, yy = freq_lattice(n, trace.period)
    mask = np.ones((n, n), dtype=bool)
    mask[0, 0] = False
    sym = dtn_symbol_batch(xx[mask], yy[mask])
    v = trace.spectrum[:, mask]
    pair = np.einsum("im,ijm,jm->", np.conj(v), sym, v)
    mean = trace.spectrum[:2, 0, 0]
    pair += np.conj(mean) @ (MBAR_H @ mean)
    return trace.period**2 * float(np.real(pair))


def hermitian_minimum_eigenvalue(xi):
    """Smallest eigenvalue of the Hermitian part of M_SC, normalized by the
    largest one (PSD check helper)."""
    m = dtn_symbol(np.asarray(xi, dtype=float))
    herm = 0.5 * (m + m.conj().T)
    w = np.linalg.eigvalsh(herm)
    return float(w[0] / max(w[-1], 1e-300))


def total_energy_reference(trace):
    """Dirichlet energy through the half-space solver (independent path)."""
    return HalfspaceSolution(trace).total_energy()

"""Characteristic ODE for the auxiliary phase function.

The first-order problem

    lambda^2(s) - Phi^2(s) = s lambda(s) dPhi/ds,    Phi(r) = phi0

is integrated in the log variable t = ln s, where it reads
dPhi/dt = (lambda^2 - Phi^2)/lambda.  The clamped function
Phi = max(0, Phi_tilde) then drives the radial profile through
H'/H = Phi/(s lambda), i.e. H(s) = r_star * exp(int Phi/lambda dt).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .weights import Weight

DEFAULT_N = 4096
DEFAULT_RESIDUAL_TOL = 1e-9


class AccuracyError(RuntimeError):
    """Step halving failed to bring the ODE residual under tolerance."""


@dataclass
class PhiSolution:
    s: np.ndarray            # radii, uniform in log s
    t: np.ndarray            # log radii
    phi_tilde: np.ndarray
    phi: np.ndarray | None   # max(0, phi_tilde); None before clamping
    phi0: float
    r0: float | None         # collapse radius; None before clamping
    residual: float          # max ODE defect on the grid
    step_error: float        # step-halving estimate at the right endpoint

    @property
    def r(self):
        return float(self.s[0])

    @property
    def R(self):
        return float(self.s[-1])

    @property
    def clamped(self):
        return self.phi is not None


@dataclass
class RadialProfile:
    s: np.ndarray
    H: np.ndarray
    Hdot: np.ndarray
    r_star: float
    residual: float   # max |FD(H) - Hdot| over interior nodes


class OdeGrid:
    """Log-uniform grid with the weight pretabulated at nodes and half nodes.

    Reusable across solves with different initial values, which keeps
    bisection loops (initial-value matching, thresholds) cheap.
    """

    def __init__(self, w: Weight, r, R, n=DEFAULT_N):
        if not (0 < r < R):
            raise ValueError(f"need 0 < r < R, got {r}, {R}")
        if n < 16:
            raise ValueError(f"grid size too small: {n}")
        if n % 2:
            n += 1  # Simpson quadrature needs an even interval count
        self.w = w
        self.n = n
        self.t = np.linspace(np.log(r), np.log(R), n + 1)
        self.h = (self.t[-1] - self.t[0]) / n
        self.s = np.exp(self.t)
        self.s[0], self.s[-1] = r, R
        t_fine = np.linspace(np.log(r), np.log(R), 2 * n + 1)
        s_fine = np.exp(t_fine)
        s_fine[0], s_fine[-1] = r, R
        lam_fine = np.asarray(w(s_fine), dtype=float)
        self.lam = lam_fine[::2]          # at nodes
        self.lam_half = lam_fine[1::2]    # at midpoints
        self.lam_max = float(lam_fine.max())

    def integrate(self, phi0, every=1):
        """RK4 path of phi_tilde from the left endpoint; step = every*h."""
        if every == 1:
            lam, lam_half = self.lam, self.lam_half
        elif every == 2:
            lam, lam_half = self.lam[::2], self.lam[1::2]
        else:
            raise ValueError("every must be 1 or 2")
        h = self.h * every
        n = (len(lam) - 1)
        y = np.empty(n + 1)
        y[0] = v = float(phi0)
        # bracket expansion probes extreme initial values on purpose; an
        # overflow there just means "way outside the slab" and the caller
        # only looks at the sign/size of the result
        with np.errstate(over="ignore", invalid="ignore"):
            for i in range(n):
                la, lm, lb = lam[i], lam_half[i], lam[i + 1]
                k1 = la - v * v / la
                v2 = v + 0.5 * h * k1
                k2 = lm - v2 * v2 / lm
                v3 = v + 0.5 * h * k2
                k3 = lm - v3 * v3 / lm
                v4 = v + h * k3
                k4 = lb - v4 * v4 / lb
                v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                y[i + 1] = v
        return y

    def modulus(self, phi):
        """Composite-Simpson quadrature of Phi/(s lambda) ds = Phi/lambda dt."""
        return float(simpson(phi / self.lam, dx=self.h))


def solve_phi_tilde(w: Weight, r, R, phi0, n=DEFAULT_N,
                    tol=DEFAULT_RESIDUAL_TOL, grid: OdeGrid | None = None):
    """Integrate the characteristic ODE with initial value phi0."""
    if w.validate() is not None:
        raise ValueError("weight failed validation")
    g = grid if grid is not None else OdeGrid(w, r, R, n)
    y = g.integrate(phi0)
    coarse = g.integrate(phi0, every=2)
    step_error = abs(y[-1] - coarse[-1]) / 15.0
    residual = _ode_residual(g, y)
    if residual > tol:
        g2 = OdeGrid(w, r, R, 2 * g.n)
        y2 = g2.integrate(phi0)
        if _ode_residual(g2, y2) > tol:
            raise AccuracyError(
                f"ODE residual {residual:.3e} above {tol:.1e} at n and 2n")
        g, y = g2, y2
        residual = _ode_residual(g, y)
    bound = max(abs(phi0), g.lam_max) * (1 + 1e-12) + 1e-15
    assert np.max(np.abs(y)) <= bound, "a priori bound violated"
    return PhiSolution(s=g.s, t=g.t, phi_tilde=y, phi=None, phi0=float(phi0),
                       r0=None, residual=residual, step_error=step_error)


def _ode_residual(g: OdeGrid, y):
    rhs = g.lam - y * y / g.lam
    dy = fd_derivative(y, g.h)
    return float(np.max(np.abs(dy - rhs)))


def fd_derivative(y, h):
    """Fourth-order finite-difference derivative on a uniform grid."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 6:
        return np.gradient(y, h)
    d = np.empty_like(y)
    d[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
    # one-sided 4th order at the two nodes next to each boundary
    c0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
    c1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0
    d[0] = np.dot(c0, y[:5]) / h
    d[1] = np.dot(c1, y[:5]) / h
    d[-1] = -np.dot(c0, y[-5:][::-1]) / h
    d[-2] = -np.dot(c1, y[-5:][::-1]) / h
    return d


def cumulative_integral(f, h):
    """Cumulative integral on a uniform grid, 4th order.

    Interior steps use the cubic through the four surrounding nodes; the
    first and last steps use one-sided cubics.  Steps whose own endpoints
    both vanish contribute exactly zero, so an identically-zero stretch of
    the integrand accumulates nothing (needed for the collapse plateau).
    """
    f = np.asarray(f, dtype=float)
    n = len(f) - 1
    inc = np.empty(n)
    if n >= 3:
        inc[1:-1] = (h / 24.0) * (-f[:-3] + 13 * f[1:-2] + 13 * f[2:-1] - f[3:])
        inc[0] = (h / 24.0) * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3])
        inc[-1] = (h / 24.0) * (9 * f[-1] + 19 * f[-2] - 5 * f[-3] + f[-4])
    else:
        inc[:] = 0.5 * h * (f[:-1] + f[1:])
    inc[(f[:-1] == 0.0) & (f[1:] == 0.0)] = 0.0
    out = np.empty(n + 1)
    out[0] = 0.0
    np.cumsum(inc, out=out[1:])
    return out


def clamp_and_collapse(p: PhiSolution, w: Weight | None = None):
    """Fill phi = max(0, phi_tilde) and locate the collapse radius r0."""
    phi = np.maximum(0.0, p.phi_tilde)
    if p.phi0 >= 0:
        r0 = p.r
    elif p.phi_tilde[-1] < 0:
        r0 = p.R
    else:
        i = int(np.searchsorted(p.phi_tilde >= 0, True))
        r0 = _refine_root(p, w, i - 1)
    return PhiSolution(s=p.s, t=p.t, phi_tilde=p.phi_tilde, phi=phi,
                       phi0=p.phi0, r0=float(r0), residual=p.residual,
                       step_error=p.step_error)


def _refine_root(p: PhiSolution, w: Weight | None, i):
    """Root of phi_tilde inside the bracketing cell [t_i, t_{i+1}].

    The sign change is located by bisection on short RK4 integrations
    started from the left node; falls back to linear interpolation when
    the weight is not available.
    """
    t_lo, t_hi = p.t[i], p.t[i + 1]
    y_lo, y_hi = p.phi_tilde[i], p.phi_tilde[i + 1]
    if w is None:
        frac = y_lo / (y_lo - y_hi)
        return np.exp(t_lo + frac * (t_hi - t_lo))

    def value_at(t):
        # 4 RK4 substeps from (t_lo, y_lo) to t
        h = (t - t_lo) / 4.0
        v, tt = y_lo, t_lo
        for _ in range(4):
            la = w(min(np.exp(tt), p.R))
            lm = w(min(np.exp(tt + 0.5 * h), p.R))
            lb = w(min(np.exp(tt + h), p.R))
            k1 = la - v * v / la
            v2 = v + 0.5 * h * k1
            k2 = lm - v2 * v2 / lm
            v3 = v + 0.5 * h * k2
            k3 = lm - v3 * v3 / lm
            v4 = v + h * k3
            k4 = lb - v4 * v4 / lb
            v += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            tt += h
        return v

    a, b = t_lo, t_hi
    fa = y_lo
    for _ in range(60):
        m = 0.5 * (a + b)
        fm = value_at(m)
        if fa * fm <= 0:
            b = m
        else:
            a, fa = m, fm
        if b - a < 1e-15:
            break
    return np.exp(0.5 * (a + b))


def modulus_of(p: PhiSolution, w: Weight):
    """Quadrature of Phi/(s lambda) ds, the log-modulus of the target."""
    if not p.clamped:
        raise ValueError("clamp_and_collapse must run before modulus_of")
    lam = np.asarray(w(p.s), dtype=float)
    h = p.t[1] - p.t[0]
    return float(simpson(p.phi / lam, dx=h))


def recover_H(p: PhiSolution, w: Weight, r_star):
    """Radial profile H(s) = r_star * exp(int_r^s Phi/(t lambda) dt)."""
    if not p.clamped:
        raise ValueError("clamp_and_collapse must run before recover_H")
    if r_star <= 0:
        raise ValueError(f"r_star must be positive, got {r_star}")
    lam = np.asarray(w(p.s), dtype=float)
    h = p.t[1] - p.t[0]
    H = r_star * np.exp(cumulative_integral(p.phi / lam, h))
    Hdot = H * p.phi / (p.s * lam)
    fd = fd_derivative(H, h) / p.s
    residual = float(np.max(np.abs(fd - Hdot)))
    return RadialProfile(s=p.s, H=H, Hdot=Hdot, r_star=float(r_star),
                         residual=residual)

"""Discrete weighted Dirichlet energies and projected-descent minimizers.

Everything is set up in the log-radius variable t = ln s, where the polar
energy of a map h on the annulus becomes a weighted flat Dirichlet energy
on a cylinder:

    E = int int lambda(s(t)) (|h_t|^2 + |h_theta|^2) dt dtheta.

Node-centered values, cell-averaged differences and midpoint-cell
quadrature make the discrete energy a positive quadratic form with an
exact, cheap gradient.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import isotonic_regression

from . import radial as rd
from .weights import Weight

MODE_FREE = "free"
MODE_FIXED_OUTER = "fixed_outer"


class AdmissibilityError(ValueError):
    """Map or profile violates the admissible-class constraints."""


class DegenerateRowError(ValueError):
    """Winding number undefined: a row passes through or collapses to a point."""


class FeasibilityError(RuntimeError):
    """Descent left the admissible class and restarts did not recover."""


@dataclass
class EnergyReport:
    total: float
    radial_term: float     # sum of s*lambda*|h_s|^2 contributions
    angular_term: float    # sum of (lambda/s)*|h_theta|^2 contributions
    ns: int
    ntheta: int
    scheme: str
    iterations: int = 0
    converged: bool = True
    negative_jacobian_fraction: float | None = None


@dataclass
class RadialVector:
    s: np.ndarray
    H: np.ndarray

    def check(self, r_star=None, R_star=None, tol=1e-10):
        if np.any(np.diff(self.H) < -tol):
            raise AdmissibilityError("H must be nondecreasing")
        if r_star is not None and abs(self.H[0] - r_star) > tol:
            raise AdmissibilityError("H(r) must equal r_star")
        if R_star is not None and abs(self.H[-1] - R_star) > tol:
            raise AdmissibilityError("H(R) must equal R_star")


@dataclass
class PolarGridMap:
    h: np.ndarray                 # complex, shape (ns, ntheta)
    pair: rd.AnnulusPair
    mode: str = MODE_FREE
    t: np.ndarray = field(default=None, repr=False)
    theta: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        ns, ntheta = self.h.shape
        if self.t is None:
            self.t = np.linspace(np.log(self.pair.r), np.log(self.pair.R), ns)
        if self.theta is None:
            self.theta = 2 * np.pi * np.arange(ntheta) / ntheta

    @property
    def ns(self):
        return self.h.shape[0]

    @property
    def ntheta(self):
        return self.h.shape[1]

    @property
    def s(self):
        return np.exp(self.t)

    @property
    def dt(self):
        return self.t[1] - self.t[0]

    @property
    def dtheta(self):
        return 2 * np.pi / self.ntheta

    def copy(self):
        return PolarGridMap(self.h.copy(), self.pair, self.mode,
                            t=self.t, theta=self.theta)

    def check(self, tol=1e-9):
        p = self.pair
        mod = np.abs(self.h)
        if np.any(mod < p.r_star - tol) or np.any(mod > p.R_star + tol):
            raise AdmissibilityError("|h| outside [r_star, R_star]")
        if np.max(np.abs(mod[0] - p.r_star)) > tol:
            raise AdmissibilityError("inner boundary row must have |h| = r_star")
        if np.max(np.abs(mod[-1] - p.R_star)) > tol:
            raise AdmissibilityError("outer boundary row must have |h| = R_star")
        if self.mode == MODE_FIXED_OUTER:
            pinned = p.R_star * np.exp(1j * self.theta)
            if np.max(np.abs(self.h[-1] - pinned)) > tol:
                raise AdmissibilityError("outer row must be pinned in fixed mode")
        for i in (0, self.ns // 2, self.ns - 1):
            if winding_number(self, i) != 1:
                raise AdmissibilityError(f"row {i} winding is not +1")


def winding_number(m: PolarGridMap, row):
    """Discrete degree of the image of a grid circle about the origin."""
    z = m.h[row]
    if np.any(np.abs(z) < 1e-300):
        raise DegenerateRowError(f"row {row} passes through the origin")
    if np.ptp(z.real) == 0.0 and np.ptp(z.imag) == 0.0:
        raise DegenerateRowError(f"row {row} collapsed to a single point")
    ang = np.angle(np.roll(z, -1) / z)
    return int(np.rint(np.sum(ang) / (2 * np.pi)))


def jacobian_cells(w_or_none, m: PolarGridMap):
    """Discrete Jacobian density Im(conj(h_t) h_theta) per cell.

    This is J_h * s^2, i.e. the Jacobian against the measure dt dtheta.
    """
    Dt, Dth = cell_diffs(m.h, m.dt, m.dtheta)
    return np.imag(np.conj(Dt) * Dth)


def negative_jacobian_fraction(m: PolarGridMap):
    J = jacobian_cells(None, m)
    return float(np.mean(J < 0))


def cell_diffs(h, dt, dtheta):
    """Cell-averaged forward differences; theta is periodic."""
    hr = np.roll(h, -1, axis=1)
    Dt = (h[1:] + hr[1:] - h[:-1] - hr[:-1]) / (2 * dt)
    Dth = (hr[1:] + hr[:-1] - h[1:] - h[:-1]) / (2 * dtheta)
    return Dt, Dth


def cell_average(v):
    """Average of the four corner nodes per cell (periodic in theta)."""
    vr = np.roll(v, -1, axis=1)
    return 0.25 * (v[1:] + v[:-1] + vr[1:] + vr[:-1])


def cell_lambda(w: Weight, m: PolarGridMap):
    t_mid = 0.5 * (m.t[1:] + m.t[:-1])
    s_mid = np.minimum(np.exp(t_mid), m.pair.R)
    return np.asarray(w(s_mid), dtype=float)[:, None]


# ---------------------------------------------------------------------------
# 1-D radial energy and minimizer


def radial_energy(w: Weight, rv: RadialVector, check=True):
    """Energy 2 pi int lambda (H^2/s + s Hdot^2) ds of a radial map."""
    if check:
        rv.check()
    rep = _radial_energy_report(w, rv)
    return rep.total


def _radial_energy_report(w: Weight, rv: RadialVector):
    t = np.log(rv.s)
    h = t[1] - t[0]
    lam_mid = np.asarray(w(np.minimum(np.exp(0.5 * (t[1:] + t[:-1])), rv.s[-1])),
                         dtype=float)
    Hm = 0.5 * (rv.H[1:] + rv.H[:-1])
    slope = np.diff(rv.H) / h
    ang = 2 * np.pi * h * float(np.sum(lam_mid * Hm ** 2))
    radl = 2 * np.pi * h * float(np.sum(lam_mid * slope ** 2))
    return EnergyReport(total=ang + radl, radial_term=radl, angular_term=ang,
                        ns=len(rv.s), ntheta=1, scheme="midcell-trapezoid")


def minimize_radial(w: Weight, pair: rd.AnnulusPair, n=2048, max_iter=50000,
                    tol=1e-12):
    """Direct minimization over monotone radial profiles.

    Accelerated projected gradient with function-value restarts; the
    projection is isotonic regression of the interior values with clamped
    endpoints.  Serves as an ODE-independent oracle for the minimizer.
    """
    if w.validate() is not None:
        raise ValueError("weight failed validation")
    t = np.linspace(np.log(pair.r), np.log(pair.R), n + 1)
    h = (t[-1] - t[0]) / n
    s = np.exp(t)
    s[0], s[-1] = pair.r, pair.R
    lam_mid = np.asarray(w(np.minimum(np.exp(0.5 * (t[1:] + t[:-1])), pair.R)),
                         dtype=float)
    two_pi_h = 2 * np.pi * h

    def energy(H):
        Hm = 0.5 * (H[1:] + H[:-1])
        slope = np.diff(H) / h
        return two_pi_h * float(np.sum(lam_mid * (Hm ** 2 + slope ** 2)))

    def grad(H):
        Hm = 0.5 * (H[1:] + H[:-1])
        slope = np.diff(H) / h
        a = lam_mid * Hm            # d/dHm part
        b = 2.0 * lam_mid * slope / h
        g = np.zeros_like(H)
        g[:-1] += a - b
        g[1:] += a + b
        return two_pi_h * g

    def project(H):
        out = H.copy()
        inner = isotonic_regression(H[1:-1]).x
        out[1:-1] = np.clip(inner, pair.r_star, pair.R_star)
        out[0], out[-1] = pair.r_star, pair.R_star
        return np.maximum.accumulate(out)

    # Lipschitz constant of the gradient by power iteration (quadratic form)
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(n + 1)
    for _ in range(40):
        v = grad(v)
        v /= np.linalg.norm(v)
    L = float(np.linalg.norm(grad(v))) * 1.05

    x = project(pair.r_star + (pair.R_star - pair.r_star)
                * (s - pair.r) / (pair.R - pair.r))
    E_cur = energy(x)
    y = x.copy()
    t_k = 1.0
    quiet = 0
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        x_new = project(y - grad(y) / L)
        E_new = energy(x_new)
        if E_new > E_cur:   # momentum overshoot: restart from current iterate
            t_k = 1.0
            y = x
            x_new = project(y - grad(y) / L)
            E_new = energy(x_new)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_k * t_k))
        y = x_new + ((t_k - 1.0) / t_next) * (x_new - x)
        t_k = t_next
        quiet = quiet + 1 if abs(E_new - E_cur) <= tol * max(abs(E_new), 1.0) \
            else 0
        x, E_cur = x_new, E_new
        if quiet >= 10:
            converged = True
            break
    if not converged:
        warnings.warn("minimize_radial hit the iteration cap; "
                      "returning the best iterate", RuntimeWarning)
    rv = RadialVector(s=s, H=x)
    rep = _radial_energy_report(w, rv)
    rep.iterations = it
    rep.converged = converged
    return rv, rep


# ---------------------------------------------------------------------------
# 2-D polar energy, gradient and minimizer


def polar_energy(w: Weight, m: PolarGridMap, check=True):
    if check:
        m.check()
    lamc = cell_lambda(w, m)
    Dt, Dth = cell_diffs(m.h, m.dt, m.dtheta)
    cell = m.dt * m.dtheta
    radl = cell * float(np.sum(lamc * (Dt.real ** 2 + Dt.imag ** 2)))
    ang = cell * float(np.sum(lamc * (Dth.real ** 2 + Dth.imag ** 2)))
    return EnergyReport(total=radl + ang, radial_term=radl, angular_term=ang,
                        ns=m.ns, ntheta=m.ntheta, scheme="midcell-quadratic")


def polar_gradient(w: Weight, m: PolarGridMap):
    """Exact gradient of the discrete polar energy.

    Returned as a complex array G; the derivative of the energy along a
    perturbation v is sum Re(conj(G) * v).
    """
    return _gradient_of(m.h, cell_lambda(w, m), m.dt, m.dtheta)


def _gradient_of(h, lamc, dt, dtheta):
    hr = np.roll(h, -1, axis=1)
    Dt = (h[1:] + hr[1:] - h[:-1] - hr[:-1]) / (2 * dt)
    Dth = (hr[1:] + hr[:-1] - h[1:] - h[:-1]) / (2 * dtheta)
    A = lamc * Dt
    B = lamc * Dth
    ns = h.shape[0]
    Aj = A + np.roll(A, 1, axis=1)
    Gt = np.empty_like(h)
    Gt[0] = -Aj[0]
    Gt[1:ns - 1] = Aj[:-1] - Aj[1:]
    Gt[ns - 1] = Aj[-1]
    Gt /= 2 * dt
    Bv = np.empty_like(h)
    Bv[0] = B[0]
    Bv[1:ns - 1] = B[1:] + B[:-1]
    Bv[ns - 1] = B[-1]
    Gth = (np.roll(Bv, 1, axis=1) - Bv) / (2 * dtheta)
    return 2 * dt * dtheta * (Gt + Gth)


def embed_radial(sol: rd.RadialSolution, ns=256, ntheta=256, mode=MODE_FREE):
    """Embed a radial minimizer as a polar-grid map h = H(s) e^{i theta}."""
    pair = sol.pair
    t = np.linspace(np.log(pair.r), np.log(pair.R), ns)
    H = np.interp(t, sol.phi.t, sol.profile.H)
    H[0], H[-1] = pair.r_star, pair.R_star
    theta = 2 * np.pi * np.arange(ntheta) / ntheta
    h = H[:, None] * np.exp(1j * theta)[None, :]
    return PolarGridMap(h, pair, mode, t=t, theta=theta)


def smooth_perturbation(shape, t, theta, amplitude, rng, kmax=4):
    """Seeded random trigonometric field vanishing at the s-boundaries."""
    ns, ntheta = shape
    T = t[-1] - t[0]
    u = (t - t[0]) / T
    field_ = np.zeros(shape)
    bound = 0.0
    for k in range(1, kmax + 1):
        for m_ in range(kmax + 1):
            a, b, c = rng.standard_normal(3)
            radial_mode = np.sin(np.pi * k * u)
            angular = a * np.cos(m_ * theta + c) + b * np.sin(m_ * theta)
            field_ += np.outer(radial_mode, angular)
            bound += abs(a) + abs(b)
    # normalize by the analytic sup bound so the continuum field does not
    # depend on the grid resolution (needed for convergence studies)
    if bound > 0:
        field_ *= amplitude / bound
    return field_


def perturb_map(m: PolarGridMap, amplitude, seed, kmax=4):
    """Admissible smooth perturbation of modulus and argument."""
    rng = np.random.default_rng(seed)
    G = np.abs(m.h)
    alpha = np.angle(m.h)
    span = m.pair.R_star - m.pair.r_star
    dG = smooth_perturbation(m.h.shape, m.t, m.theta, amplitude * span, rng, kmax)
    dA = smooth_perturbation(m.h.shape, m.t, m.theta, amplitude * np.pi, rng, kmax)
    G2 = np.clip(G + dG, m.pair.r_star, m.pair.R_star)
    out = PolarGridMap(G2 * np.exp(1j * (alpha + dA)), m.pair, m.mode,
                       t=m.t, theta=m.theta)
    if m.mode == MODE_FIXED_OUTER:
        out.h[-1] = m.pair.R_star * np.exp(1j * m.theta)
    for i in (0, out.ns // 2, out.ns - 1):
        if winding_number(out, i) != 1:
            raise AdmissibilityError("perturbation destroyed the row winding")
    return out


def _project(h, m: PolarGridMap):
    p = m.pair
    mod = np.abs(h)
    bad = mod < 1e-300
    if np.any(bad):
        # re-seat degenerate nodes on the inner target circle
        h = np.where(bad, p.r_star * np.exp(1j * m.theta)[None, :], h)
        mod = np.abs(h)
    out = h * (np.clip(mod, p.r_star, p.R_star) / mod)
    out[0] = p.r_star * out[0] / np.abs(out[0])
    if m.mode == MODE_FIXED_OUTER:
        out[-1] = p.R_star * np.exp(1j * m.theta)
    else:
        out[-1] = p.R_star * out[-1] / np.abs(out[-1])
    return out


def minimize_polar(w: Weight, pair: rd.AnnulusPair, ns=256, ntheta=256,
                   mode=MODE_FREE, init: PolarGridMap | None = None,
                   seed=0, perturbation=0.0, max_iter=2000, tol=1e-12,
                   radial_solution: rd.RadialSolution | None = None,
                   momentum=True):
    """Projected descent over admissible polar-grid maps.

    Default initialization is the embedded radial minimizer, optionally
    with a seeded smooth perturbation.  The projection clamps moduli into
    [r_star, R_star] and re-pins the boundary rows for the mode; row
    windings are monitored and a winding change triggers a restart with a
    smaller step.
    """
    if w.validate() is not None:
        raise ValueError("weight failed validation")
    if init is None:
        sol = radial_solution if radial_solution is not None \
            else rd.build(w, pair)
        init = embed_radial(sol, ns, ntheta, mode)
    if perturbation > 0:
        init = perturb_map(init, perturbation, seed)
    init.check()
    m = init.copy()
    lamc = cell_lambda(w, m)
    dt, dth = m.dt, m.dtheta
    cell = dt * dth

    def energy(h):
        Dt, Dth = cell_diffs(h, dt, dth)
        return cell * float(np.sum(lamc * (np.abs(Dt) ** 2 + np.abs(Dth) ** 2)))

    rng = np.random.default_rng(99991)
    v = rng.standard_normal(m.h.shape) + 1j * rng.standard_normal(m.h.shape)
    for _ in range(30):
        v = _gradient_of(v, lamc, dt, dth)
        v /= np.linalg.norm(v)
    L = float(np.linalg.norm(_gradient_of(v, lamc, dt, dth))) * 1.05

    step_scale = 1.0
    for attempt in range(4):
        h = init.h.copy()
        E_cur = energy(h)
        y = h.copy()
        t_k = 1.0
        quiet = 0
        it = 0
        converged = False
        ok = True
        for it in range(1, max_iter + 1):
            g = _gradient_of(y, lamc, dt, dth)
            h_new = _project(y - (step_scale / L) * g, m)
            E_new = energy(h_new)
            if momentum and E_new > E_cur:
                t_k = 1.0
                y = h
                h_new = _project(y - (step_scale / L)
                                 * _gradient_of(y, lamc, dt, dth), m)
                E_new = energy(h_new)
            if momentum:
                t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_k * t_k))
                y = h_new + ((t_k - 1.0) / t_next) * (h_new - h)
                t_k = t_next
            else:
                y = h_new
            if it % 100 == 0:
                probe = PolarGridMap(h_new, pair, mode, t=m.t, theta=m.theta)
                try:
                    probe.check()
                except (AdmissibilityError, DegenerateRowError):
                    ok = False
                    break
            quiet = quiet + 1 if abs(E_new - E_cur) <= tol * max(abs(E_new), 1.0) \
                else 0
            h, E_cur = h_new, E_new
            if quiet >= 10:
                converged = True
                break
        if ok:
            out = PolarGridMap(h, pair, mode, t=m.t, theta=m.theta)
            try:
                out.check()
                break
            except (AdmissibilityError, DegenerateRowError):
                pass
        step_scale *= 0.5
    else:
        raise FeasibilityError("descent kept leaving the admissible class")
    if not converged and it >= max_iter:
        warnings.warn("minimize_polar hit the iteration cap; "
                      "returning the best iterate", RuntimeWarning)
    rep = polar_energy(w, out, check=False)
    rep.iterations = it
    rep.converged = converged
    rep.negative_jacobian_fraction = negative_jacobian_fraction(out)
    return out, rep

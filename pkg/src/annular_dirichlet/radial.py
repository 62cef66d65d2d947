"""Radial minimizer construction, thresholds and proof certificates.

Builds the radial minimizer for an annulus pair by shooting on the
initial value phi0, computes the homeomorphism threshold m and the
thin-target threshold g, the closed-form minimal energies, and the
numerical certificates behind the monotone-weight and fixed-boundary
minimality proofs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .phi_ode import (DEFAULT_N, OdeGrid, PhiSolution, RadialProfile,
                      clamp_and_collapse, fd_derivative, modulus_of,
                      recover_H, solve_phi_tilde)
from .weights import Weight

MODULUS_TOL = 1e-10
PHI0_INTERVAL_TOL = 1e-12
G_PREDICATE_SLACK = 1e-10
MAX_BRACKET_DOUBLINGS = 60

CASE1 = "case1"   # homeomorphism: phi0 >= 0
CASE2 = "case2"   # collapsing: phi0 < 0, flat profile on [r, r0]


class NoSolutionError(RuntimeError):
    """Bracket expansion for the initial value failed (should not happen)."""


class CertificateError(RuntimeError):
    """A certificate margin is negative where theory forbids it."""


@dataclass(frozen=True)
class AnnulusPair:
    r: float
    R: float
    r_star: float
    R_star: float

    def __post_init__(self):
        if not (0 < self.r < self.R):
            raise ValueError(f"domain radii must satisfy 0 < r < R: {self}")
        if not (0 < self.r_star < self.R_star):
            raise ValueError(f"target radii must satisfy 0 < r* < R*: {self}")

    @property
    def mod_domain(self):
        return float(np.log(self.R / self.r))

    @property
    def mod_target(self):
        return float(np.log(self.R_star / self.r_star))


@dataclass
class RadialSolution:
    pair: AnnulusPair
    phi: PhiSolution
    profile: RadialProfile
    case_tag: str
    energy: float

    @property
    def phi0(self):
        return self.phi.phi0

    @property
    def r0(self):
        return self.phi.r0


@dataclass
class CertificateReport:
    c: float
    tau: np.ndarray
    margin_tau: float
    margin_tau_dot: float
    margin_angular: float      # lambda/s - tau_dot
    margin_radial: float       # s*lambda - c/Hdot (n/a -> +inf when skipped)
    identity_residual: float   # |(lambda/s - tau_dot)(s lambda - c/Hdot) - tau^2|
    obs2_residual: float       # |d/ds(H Phi) - lambda H / s|
    radial_margin_applicable: bool


@dataclass
class FixedBoundaryCoeffs:
    g: np.ndarray        # Phi^2/(Phi^2 + lambda^2), in [0, 1)
    rho1: np.ndarray     # Phi * H
    rho2: np.ndarray     # lambda * H / s
    residual: float      # max |d rho1/ds - rho2| where the ODE holds


def find_initial_value(w: Weight, pair: AnnulusPair, tol=MODULUS_TOL,
                       n=DEFAULT_N, grid: OdeGrid | None = None):
    """Initial value phi0 whose target modulus matches the annulus pair.

    The modulus is nondecreasing in phi0, so a bracket found by geometric
    expansion from [-max lambda, max lambda] is narrowed by bisection.
    """
    g = grid if grid is not None else OdeGrid(w, pair.r, pair.R, n)
    target = pair.mod_target

    def mod(phi0):
        y = np.maximum(0.0, g.integrate(phi0))
        return g.modulus(y)

    lo, hi = -g.lam_max, g.lam_max
    step = g.lam_max
    for _ in range(MAX_BRACKET_DOUBLINGS):
        if mod(lo) <= target:
            break
        step *= 2.0
        lo -= step
    else:
        raise NoSolutionError("no lower bracket for the initial value")
    step = g.lam_max
    for _ in range(MAX_BRACKET_DOUBLINGS):
        if mod(hi) >= target:
            break
        step *= 2.0
        hi += step
    else:
        raise NoSolutionError("no upper bracket for the initial value")

    scale = max(1.0, g.lam_max)
    while hi - lo > PHI0_INTERVAL_TOL * scale:
        mid = 0.5 * (lo + hi)
        m = mod(mid)
        if abs(m - target) <= tol:
            lo = hi = mid
            break
        if m < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def build(w: Weight, pair: AnnulusPair, n=DEFAULT_N):
    """Construct the radial minimizer end to end for the given pair."""
    grid = OdeGrid(w, pair.r, pair.R, n)
    phi0 = find_initial_value(w, pair, grid=grid)
    p = clamp_and_collapse(solve_phi_tilde(w, pair.r, pair.R, phi0, grid=grid), w)
    profile = recover_H(p, w, pair.r_star)
    # pin the outer target radius exactly; the modulus already matches to tol
    factor = pair.R_star / profile.H[-1]
    profile.H *= factor
    profile.Hdot *= factor
    case = CASE1 if phi0 >= 0 else CASE2
    sol = RadialSolution(pair=pair, phi=p, profile=profile, case_tag=case,
                         energy=0.0)
    sol.energy = energy_closed_form(sol, w)
    return sol


def threshold_m(w: Weight, rho, n=DEFAULT_N):
    """Homeomorphism threshold: exp of the modulus integral at phi0 = 0."""
    if rho <= 1:
        raise ValueError(f"need rho > 1, got {rho}")
    r, R = w.r, w.R
    if not np.isclose(R / r, rho):
        # thresholds depend only on the ratio; reuse the weight's interval
        # only when it matches, otherwise solve on [1, rho] with a
        # transported copy of the weight
        w = _transport(w, 1.0, rho)
        r, R = 1.0, rho
    p = clamp_and_collapse(solve_phi_tilde(w, r, R, 0.0, n=n), w)
    return float(np.exp(modulus_of(p, w)))


def threshold_g(w: Weight, rho, n=DEFAULT_N):
    """Thin-target threshold: exp of the modulus of the largest solution
    staying below the weight everywhere."""
    if rho <= 1:
        raise ValueError(f"need rho > 1, got {rho}")
    r, R = w.r, w.R
    if not np.isclose(R / r, rho):
        w = _transport(w, 1.0, rho)
        r, R = 1.0, rho
    g = OdeGrid(w, r, R, n)
    slack = G_PREDICATE_SLACK * g.lam_max

    def admissible(phi0):
        y = g.integrate(phi0)
        return float(np.max(np.maximum(0.0, y) - g.lam)) <= slack

    lo, hi = 0.0, g.lam_max * (1 + 1e-6)
    step = g.lam_max
    for _ in range(MAX_BRACKET_DOUBLINGS):
        if admissible(lo):
            break
        step *= 2.0
        lo -= step
    else:
        raise NoSolutionError("no admissible initial value found")
    for _ in range(MAX_BRACKET_DOUBLINGS):
        if not admissible(hi):
            break
        step *= 2.0
        hi += step
    scale = max(1.0, g.lam_max)
    while hi - lo > PHI0_INTERVAL_TOL * scale:
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            lo = mid
        else:
            hi = mid
    y = np.maximum(0.0, g.integrate(lo))
    return float(np.exp(g.modulus(y)))


def _transport(w: Weight, r, R):
    """Copy of the weight rescaled in s to live on [r, R]."""
    if w.kind == "constant":
        return Weight.constant(w.value, r, R)
    if not np.isclose(R / r, w.R / w.r):
        raise ValueError(
            "threshold ratio must match the weight's interval ratio "
            "(except for constant weights)")
    k = r / w.r
    if w.kind == "power":
        return Weight.power(w.exponent, r, R, value=w.value * k ** (-w.exponent))
    return Weight.tabulated(w.abscissae * k, w.ordinates, r=r, R=R)


def energy_closed_form(sol: RadialSolution, w: Weight):
    """Minimal energy of the pair from the boundary values of Phi.

    Case 1: 2 pi (R*^2 Phi(R) - r*^2 Phi(r)).
    Case 2: 2 pi R*^2 Phi(R) + 2 pi r*^2 int_r^{r0} lambda/s ds.
    """
    pair = sol.pair
    phiR = float(sol.phi.phi[-1])
    if sol.case_tag == CASE1:
        phir = float(sol.phi.phi[0])
        return float(2 * np.pi * (pair.R_star ** 2 * phiR
                                  - pair.r_star ** 2 * phir))
    t = np.linspace(np.log(pair.r), np.log(sol.r0), 2049)
    lam = np.asarray(w(np.minimum(np.exp(t), pair.R)), dtype=float)
    collapse = simpson(lam, dx=t[1] - t[0])
    return float(2 * np.pi * (pair.R_star ** 2 * phiR
                              + pair.r_star ** 2 * collapse))


def _smooth_start(sol: RadialSolution):
    """First grid index from which the unclamped ODE holds (s >= r0)."""
    if sol.case_tag == CASE1:
        return 0
    return int(np.searchsorted(sol.phi.s, sol.r0, side="left"))


def claim1_certificate(sol: RadialSolution, w: Weight, tol=1e-8):
    """Margins and residuals for the tau-identity certificate.

    Requires a nondecreasing weight.  The constant is c = H(r) Phi(r)
    (zero in the collapsing case).  Derivatives are 4th-order finite
    differences restricted to the range where the unclamped ODE holds.
    """
    if not w.is_nondecreasing():
        raise CertificateError(
            "certificate requires a nondecreasing weight")
    s = sol.phi.s
    h = sol.phi.t[1] - sol.phi.t[0]
    lam = np.asarray(w(s), dtype=float)
    phi = sol.phi.phi
    H = sol.profile.H
    Hdot = sol.profile.Hdot
    c = float(H[0] * phi[0])
    tau = phi - c / H

    i0 = _smooth_start(sol)
    tau_dot = np.zeros_like(tau)
    if len(tau) - i0 >= 6:
        tau_dot[i0:] = fd_derivative(tau[i0:], h) / s[i0:]
    ang = lam / s - tau_dot

    if c == 0.0:
        # collapse region contributes s*lambda since the c/Hdot term vanishes
        rad = s * lam
        applicable = True
    else:
        # c/Hdot = c*s*lambda/(H*Phi); the quotient form avoids cancellation
        # where Hdot is tiny, and H*Phi >= c by the monotonicity of H*Phi
        rad = s * lam * (1.0 - c / (H * phi))
        applicable = True

    ident = np.abs(ang[i0:] * rad[i0:] - tau[i0:] ** 2)
    hphi_dot = fd_derivative((H * phi)[i0:], h) / s[i0:]
    obs2 = np.abs(hphi_dot - (lam * H / s)[i0:])

    report = CertificateReport(
        c=c,
        tau=tau,
        margin_tau=float(np.min(tau[i0:])),
        margin_tau_dot=float(np.min(tau_dot[i0:])),
        margin_angular=float(np.min(ang[i0:])),
        margin_radial=float(np.min(rad[i0:])),
        identity_residual=float(np.max(ident)),
        obs2_residual=float(np.max(obs2)),
        radial_margin_applicable=applicable,
    )
    margins = [report.margin_tau, report.margin_tau_dot,
               report.margin_angular, report.margin_radial]
    if min(margins) < -tol:
        raise CertificateError(
            f"negative certificate margin with nondecreasing weight: {margins}")
    return report


def fixed_boundary_coefficients(sol: RadialSolution, w: Weight):
    """Coefficients of the fixed-outer-boundary estimate and their identity
    residual d(Phi H)/ds = lambda H / s on the range where the ODE holds."""
    s = sol.phi.s
    h = sol.phi.t[1] - sol.phi.t[0]
    lam = np.asarray(w(s), dtype=float)
    phi = sol.phi.phi
    H = sol.profile.H
    g = phi ** 2 / (phi ** 2 + lam ** 2)
    rho1 = phi * H
    rho2 = lam * H / s
    i0 = _smooth_start(sol)
    rho1_dot = fd_derivative(rho1[i0:], h) / s[i0:]
    residual = float(np.max(np.abs(rho1_dot - rho2[i0:])))
    return FixedBoundaryCoeffs(g=g, rho1=rho1, rho2=rho2, residual=residual)

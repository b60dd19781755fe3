"""Replica fixed points, mutual information rates, and information bounds.

The asymptotic mutual information rate between the support pattern and the
observations splits as I = I1 - I2.  I1 comes from a replica-symmetric
fixed point: eta = R(-chi), chi = mmse(q, px, eta), with the free energy

    I1(eta, chi) = I(V0; V0 + eta^{-1/2} Z) + int_0^chi R(-w) dw - eta chi

minimised over the solutions when several coexist.  I2 is the exact
log-determinant rate of the Gaussian subproblem, characterised by a unique
(alpha, nu) pair through the eta-transform of the ensemble.  Bounds from
sampling/data-processing (unitary), the Shannon transform, the matched
filter, and successive interference cancellation corroborate both parts and
feed the rate-distortion lower bound on the support error rate.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import ensembles as en
from . import scalar_channel as sc
from .scalar_channel import BernoulliGaussianSource

__all__ = [
    "NoSolution",
    "SystemParams",
    "FixedPointSolution",
    "MatchedSolutions",
    "AlphaNuSolution",
    "MutualInfoRate",
    "matched_mapping",
    "solve_matched",
    "free_energy_i1",
    "solve_alpha_nu",
    "mutual_info_i2",
    "mutual_info_total",
    "bound_unitary_upper",
    "bound_shannon_upper",
    "bound_mf_upper",
    "bound_sic_lower",
    "info_rate_upper_bound",
    "distortion_lower_bound",
    "high_snr_converse_check",
]


class NoSolution(RuntimeError):
    """The fixed-point scan found no crossing (never silently defaulted)."""


@dataclass(frozen=True)
class SystemParams:
    """Ensemble plus source: sampling rate p lives inside the ensemble."""

    ensemble: en.Ensemble
    q: float
    px: float

    def __post_init__(self):
        if not 0.0 < self.q <= 1.0:
            raise ValueError(f"sparsity q={self.q} outside (0, 1]")
        if self.px <= 0.0:
            raise ValueError("px must be positive")

    @property
    def source(self):
        return BernoulliGaussianSource(self.q, self.px)

    @property
    def snr(self):
        return self.q * self.px


@dataclass(frozen=True)
class FixedPointSolution:
    """One (eta, chi) replica solution with its free energy and stability."""

    eta: float
    chi: float
    free_energy_i1: float
    stability: str  # "stable" | "unstable"

    @property
    def inv_eta(self):
        return 1.0 / self.eta


@dataclass(frozen=True)
class MatchedSolutions:
    """All matched fixed points, ordered by increasing 1/eta."""

    solutions: tuple
    selected_index: int  # free-energy minimiser
    rightmost_index: int  # largest 1/eta, the conjectured AMP-MMSE point

    @property
    def selected(self):
        return self.solutions[self.selected_index]

    @property
    def rightmost(self):
        return self.solutions[self.rightmost_index]

    def __len__(self):
        return len(self.solutions)


@dataclass(frozen=True)
class AlphaNuSolution:
    alpha: float
    nu: float


@dataclass(frozen=True)
class MutualInfoRate:
    i: float
    i1: float
    i2: float
    clipped: bool = False


# ---------------------------------------------------------------------------
# matched system for I1
# ---------------------------------------------------------------------------

def matched_mapping(params, inv_eta):
    """f(1/eta) = 1 / R(-mmse(q, px, eta)); fixed points solve the system."""
    if inv_eta <= 0.0:
        raise ValueError("inv_eta must be positive")
    chi = sc.mmse_bg(params.source, 1.0 / inv_eta)
    r = en.r_transform(params.ensemble, -chi)
    if r <= 0.0:
        raise NoSolution(f"R-transform vanished at chi={chi} (p={params.ensemble.p})")
    return 1.0 / r


def free_energy_i1(params, eta, chi):
    """I1 in nats at a candidate (eta, chi) point."""
    return (
        sc.mutual_info_bg(params.source, eta)
        + en.r_transform_integral(params.ensemble, chi)
        - eta * chi
    )


_SCAN_POINTS = 2000


def _scan_grid(params, n_points):
    snr = params.snr
    lo = 1e-9 * (1.0 + snr)
    hi = 10.0 * (1.0 + snr) / max(params.ensemble.p, 1e-3)
    return np.geomspace(lo, hi, n_points)


def _find_brackets(params, grid):
    g = np.array([matched_mapping(params, float(x)) - x for x in grid])
    sign = np.sign(g)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    exact = np.nonzero(g == 0.0)[0]
    return [(grid[i], grid[i + 1]) for i in idx], [grid[i] for i in exact]


def solve_matched(params):
    """Find every matched fixed point and select the free-energy minimiser.

    Scans f(x) - x for x = 1/eta over a geometric grid, refines each sign
    change by bisection, and tags stability by |f'| < 1.  A scan returning
    exactly two crossings indicates a grazing tangency near a fold, so the
    grid is refined tenfold before accepting the count.  Raises NoSolution
    when no crossing exists.
    """
    if params.ensemble.p == 0.0:
        raise NoSolution("p = 0 observes nothing; the mapping has no fixed point")
    brackets, exact = _find_brackets(params, _scan_grid(params, _SCAN_POINTS))
    if len(brackets) == 2:
        brackets, exact = _find_brackets(params, _scan_grid(params, 10 * _SCAN_POINTS))
    if not brackets and not exact:
        raise NoSolution(f"no fixed point found for {params}")

    roots = list(exact)
    for a, b in brackets:
        ga = matched_mapping(params, a) - a
        for _ in range(90):
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            gm = matched_mapping(params, mid) - mid
            if gm == 0.0:
                a = b = mid
                break
            if (ga > 0) == (gm > 0):
                a, ga = mid, gm
            else:
                b = mid
        roots.append(0.5 * (a + b))
    roots.sort()

    sols = []
    for x in roots:
        eta = 1.0 / x
        chi = sc.mmse_bg(params.source, eta)
        h = 1e-6 * x
        slope = (matched_mapping(params, x + h) - matched_mapping(params, x - h)) / (2 * h)
        sols.append(
            FixedPointSolution(
                eta=eta,
                chi=chi,
                free_energy_i1=free_energy_i1(params, eta, chi),
                stability="stable" if abs(slope) < 1.0 else "unstable",
            )
        )
    fe = [s.free_energy_i1 for s in sols]
    return MatchedSolutions(
        solutions=tuple(sols),
        selected_index=int(np.argmin(fe)),
        rightmost_index=len(sols) - 1,
    )


# ---------------------------------------------------------------------------
# (alpha, nu) system for I2
# ---------------------------------------------------------------------------

def solve_alpha_nu(params):
    """Unique nonnegative (alpha, nu) of the Gaussian-subproblem system.

    haar: closed-form quadratic root for nu (conjugate form when the linear
    coefficient is negative), alpha = (p - nu)/(nu px (1 - p)).  iid: scalar
    root-find on nu in (0, p], using eta(nu) = q/(1 + nu px) + 1 - q from the
    second equality and matching the ensemble eta-transform from the first.
    """
    e, q, px = params.ensemble, params.q, params.px
    p = e.p
    if p == 0.0:
        return AlphaNuSolution(0.0, 0.0)
    if e.kind == "haar":
        if e.is_identity:
            eta = q / (1.0 + px) + 1.0 - q
            return AlphaNuSolution((1.0 / eta - 1.0) / px, 1.0)
        b = px * (p - q) - 1.0
        d = 4.0 * p * px * (1.0 - q)
        disc = math.sqrt(b * b + d)
        nu = (b + disc) / (2.0 * px * (1.0 - q)) if b > 0.0 else 2.0 * p / (disc - b)
        alpha = (p - nu) / (nu * px * (1.0 - p))
        return AlphaNuSolution(alpha, nu)

    def eta2(nu):
        return q / (1.0 + nu * px) + 1.0 - q

    def residual(nu):
        # first equality: eta_R(alpha px) with alpha px = (1/eta2 - 1)/nu
        return en.eta_transform(e, (1.0 / eta2(nu) - 1.0) / nu) - eta2(nu)

    lo, hi = 1e-14 * p, p
    rlo, rhi = residual(lo), residual(hi)
    if rlo == 0.0:
        nu = lo
    elif rhi == 0.0:
        nu = hi
    else:
        if rlo * rhi > 0.0:
            raise NoSolution(f"iid alpha-nu system not bracketed on (0, {p}]")
        nu = optimize.brentq(residual, lo, hi, xtol=1e-300, rtol=8.9e-16, maxiter=300)
    alpha = (1.0 / eta2(nu) - 1.0) / (nu * px)
    return AlphaNuSolution(alpha, nu)


def mutual_info_i2(params, method="closed"):
    """I2 in nats.

    method="closed" uses the ensemble-specific closed form (binary relative
    entropy for haar, the Marchenko-Pastur log-det formula for iid);
    method="general" evaluates the transform expression
    V_R(alpha px) + q log(1 + nu px) - log(1 + alpha nu px) at the solved
    (alpha, nu).  The two agree to ~1e-10 and are cross-checked in tests.
    """
    e, q, px = params.ensemble, params.q, params.px
    p = e.p
    if method == "general":
        anu = solve_alpha_nu(params)
        return (
            en.shannon_transform(e, anu.alpha * px)
            + q * math.log1p(anu.nu * px)
            - math.log1p(anu.alpha * anu.nu * px)
        )
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    if p == 0.0:
        return 0.0
    if e.kind == "haar":
        nu = solve_alpha_nu(params).nu
        return q * math.log1p(nu * px) + sc.binary_divergence(p, nu)
    x = p * px
    f4 = en._mp_f(x, q / p) / 4.0
    return (
        q * math.log1p(p * px - f4)
        + p * math.log1p(q * px - f4)
        - f4 / px
    )


def mutual_info_total(params):
    """I = I1(selected) - I2, clipped at h(q) (flagged if the excess > 1e-8)."""
    i1 = solve_matched(params).selected.free_energy_i1
    i2 = mutual_info_i2(params)
    i = i1 - i2
    hq = sc.binary_entropy(params.q)
    clipped = False
    if i > hq:
        if i - hq > 1e-8:
            clipped = True
        i = hq
    return MutualInfoRate(i=i, i1=i1, i2=i2, clipped=clipped)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def bound_unitary_upper(params):
    """Sampling upper bound on I (unitary mixing only): I(V0;V0+Z) - q log(1+px)."""
    if params.ensemble.kind != "haar":
        raise ValueError("the sampling bound requires a unitary (haar) ensemble")
    return sc.mutual_info_bg(params.source, 1.0) - params.q * math.log1p(params.px)


def bound_shannon_upper(params):
    """Shannon-transform upper bound on I1: V_R(q px)."""
    return en.shannon_transform(params.ensemble, params.snr)


def bound_mf_upper(params):
    """Matched-filter upper bound on I1: I(V0; sqrt(E[|R|^2]) V0 + Z)."""
    return sc.mutual_info_bg(params.source, en.spectrum_mean(params.ensemble))


def bound_sic_lower(params, rtol=1e-9):
    """SIC lower bound on I1: int_0^1 I(V0; sqrt(eta(q px; b)) V0 + Z) db.

    Gauss-Legendre over b, order-doubled from 64 until successive orders
    agree to rtol.
    """
    src = params.source
    snr = params.snr
    e = params.ensemble

    def integrand(betas):
        return np.array(
            [
                sc.mutual_info_bg(src, en.sic_multiuser_efficiency(e, snr, float(b)))
                for b in betas
            ]
        )

    prev = None
    for order in (64, 128, 256, 512):
        x, w = np.polynomial.legendre.leggauss(order)
        val = float(w @ integrand(0.5 * (x + 1.0))) * 0.5
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-30):
            return val
        prev = val
    return prev


def info_rate_upper_bound(params):
    """Tightest available upper bound on I (the distortion bound uses this).

    Candidates: the Shannon-transform and matched-filter bounds on I1 each
    combined with the exact I2, plus the sampling bound for haar.
    """
    i2 = mutual_info_i2(params)
    cands = [bound_shannon_upper(params) - i2, bound_mf_upper(params) - i2]
    if params.ensemble.kind == "haar":
        cands.append(bound_unitary_upper(params))
    return min(cands)


def distortion_lower_bound(params):
    """Rate-distortion converse: D >= h^-1(h(q) - I_ub), clamped at zero."""
    if params.q > 0.5:
        raise ValueError("the rate-distortion bound assumes q <= 1/2")
    gap = sc.binary_entropy(params.q) - info_rate_upper_bound(params)
    if gap <= 0.0:
        return 0.0
    return sc.binary_entropy_inverse(gap)


def high_snr_converse_check(params):
    """Analytic high-SNR cap on I for p <= q, with its comparison to h(q).

    cap = (1-p) log 1/(1-p) - (q-p) log q/(q-p)  for p < q,
          (1-q) log 1/(1-q)                      for p = q.
    Returns a dict with the cap and the strict-inequality flag cap < h(q).
    """
    p, q = params.ensemble.p, params.q
    if p > q:
        raise ValueError("the high-SNR converse applies only for p <= q")
    if p == q:
        cap = -(1.0 - q) * math.log1p(-q)
    else:
        cap = -(1.0 - p) * math.log1p(-p) - (q - p) * math.log(q / (q - p))
    return {"i_limit_upper": cap, "below_hq": cap < sc.binary_entropy(q)}

"""Scalar Bernoulli-Gaussian / AWGN channel quantities.

The decoupled channel Y = V0 + eta^{-1/2} Z with V0 = X0 B0 (X0 complex
Gaussian with variance px, B0 Bernoulli-q) drives everything in the
asymptotic analysis.  This module evaluates, in nats:

* mutual information I(V0; sqrt(a) V0 + Z),
* the conditional-mean MMSE of V0, via the Hurwitz-Lerch function Phi,
* the posterior activity probability and the MAP energy detector,
* the resulting support recovery error rate,
* binary entropy utilities for the rate-distortion bound.

Circular symmetry reduces every integral to one dimension in r = |y|^2.
The primary quadrature is Gauss-Laguerre with automatic order doubling
(96 up to 768 nodes, accepted on 1e-10 relative agreement).  Whenever the
integrand contains a logistic corner too narrow for the Laguerre nodes to
resolve (large a*px, or Phi with a << 1), the evaluation switches to an
exact split: panelled Gauss-Legendre across the corner plus a closed-form
exponential tail.  Both routes agree to ~1e-12 where their domains overlap.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg, special

__all__ = [
    "ALWAYS_ACTIVE",
    "BernoulliGaussianSource",
    "DecoupledChannel",
    "binary_entropy",
    "binary_entropy_inverse",
    "binary_divergence",
    "mutual_info_bg",
    "mmse_bg",
    "hurwitz_lerch_phi",
    "posterior_active",
    "map_threshold",
    "support_error_rate",
]

LN2 = math.log(2.0)

_GL_ORDERS = (96, 192, 384, 768)
_GL_RTOL = 1e-10


# ---------------------------------------------------------------------------
# quadrature engine
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _laguerre_rule(order, alpha):
    # Golub-Welsch on the Jacobi matrix of the weight u^alpha e^-u; scipy's
    # Newton-based roots_genlaguerre overflows beyond order ~300.
    k = np.arange(order, dtype=float)
    diag = 2.0 * k + alpha + 1.0
    off = np.sqrt(k[1:] * (k[1:] + alpha))
    nodes, vecs = linalg.eigh_tridiagonal(diag, off)
    weights = math.gamma(alpha + 1.0) * vecs[0] ** 2
    return nodes, weights


@lru_cache(maxsize=None)
def _legendre_rule(order):
    return np.polynomial.legendre.leggauss(order)


def _gauss_laguerre(g, alpha=0.0):
    """integral of u^alpha e^-u g(u), order-doubled; returns (value, ok)."""
    prev = None
    for order in _GL_ORDERS:
        u, w = _laguerre_rule(order, alpha)
        val = float(w @ g(u))
        if prev is not None and abs(val - prev) <= _GL_RTOL * max(abs(val), 1e-30):
            return val, True
        prev = val
    return prev, False


def _panels(f, edges, order=48):
    """Composite Gauss-Legendre of f over consecutive [edges] intervals."""
    x, w = _legendre_rule(order)
    a = edges[:-1]
    b = edges[1:]
    h = 0.5 * (b - a)
    nodes = a[:, None] + h[:, None] * (x[None, :] + 1.0)
    vals = f(nodes.ravel()).reshape(nodes.shape)
    return float(np.sum(h * (vals @ w)))


def _corner_edges(lo, hi, center, width, coarse):
    """Panel edges on [lo, hi] refined around a corner of the given width."""
    pts = [lo, hi]
    for k in (-40, -24, -16, -8, -4, -2, -1, 0, 1, 2, 4, 8, 16, 24, 40):
        t = center + k * width
        if lo < t < hi:
            pts.append(t)
    # geometric ladder resolves the overall decay scale
    t = coarse
    while t < hi:
        if t > lo:
            pts.append(t)
        t *= 2.0
    return np.unique(np.asarray(pts, dtype=float))


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BernoulliGaussianSource:
    """Sparse source V0 = X0 B0: activity q in (0, 1], per-component power px."""

    q: float
    px: float

    def __post_init__(self):
        if not 0.0 < self.q <= 1.0:
            raise ValueError(f"activity q={self.q} outside (0, 1]")
        if self.px <= 0.0:
            raise ValueError(f"signal power px={self.px} must be positive")

    @property
    def snr(self):
        """E|V0|^2 over unit noise variance."""
        return self.q * self.px


@dataclass(frozen=True)
class DecoupledChannel:
    """Scalar surrogate channel Y = V0 + eta^{-1/2} Z."""

    source: BernoulliGaussianSource
    eta: float

    def __post_init__(self):
        if self.eta < 0.0:
            raise ValueError(f"effective SNR scale eta={self.eta} must be >= 0")

    @property
    def mu(self):
        """Conditional rate of |Y|^2 given B0 = 1: eta / (1 + px eta)."""
        return self.eta / (1.0 + self.source.px * self.eta)


class _AlwaysActive:
    """Marker: the MAP detector declares every component active."""

    def __repr__(self):
        return "ALWAYS_ACTIVE"


ALWAYS_ACTIVE = _AlwaysActive()


# ---------------------------------------------------------------------------
# binary entropy utilities (nats)
# ---------------------------------------------------------------------------

def binary_entropy(x):
    """h(x) = x log(1/x) + (1-x) log(1/(1-x)) in nats, h(0) = h(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log1p(-x)


def binary_entropy_inverse(y):
    """Inverse of h on the increasing branch [0, 1/2], by bisection."""
    if not 0.0 <= y <= LN2 + 1e-15:
        raise ValueError(f"binary_entropy_inverse argument {y} outside [0, ln 2]")
    y = min(y, LN2)
    lo, hi = 0.0, 0.5
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def binary_divergence(a, b):
    """Binary relative entropy d(a || b) in nats."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"binary_divergence first argument {a} outside [0, 1]")
    if a == b:
        return 0.0
    if not 0.0 < b < 1.0:
        raise ValueError(f"binary_divergence second argument {b} outside (0, 1)")
    val = 0.0
    if a > 0.0:
        val += a * math.log(a / b)
    if a < 1.0:
        val += (1.0 - a) * math.log((1.0 - a) / (1.0 - b))
    return val


# ---------------------------------------------------------------------------
# mutual information I(V0; sqrt(a) V0 + Z)
# ---------------------------------------------------------------------------

def mutual_info_bg(src, a):
    """I(V0; sqrt(a) V0 + Z) in nats for the Bernoulli-Gaussian source.

    Evaluates the two exponential-weight integrals of the polar-coordinate
    reduction: with A1 = log(q/(1+a px)), A2 = log(1-q) and c = 1 + a px,

        E1 = int_0^inf logaddexp(A1 - r, A2 - c r) e^-r dr      (B0 = 1 leg)
        E2 = int_0^inf logaddexp(A1 - r/c, A2 - r) e^-r dr      (B0 = 0 leg)

    and returns -(q E1 + (1-q) E2) - 1.
    """
    if a < 0.0:
        raise ValueError(f"channel gain a={a} must be >= 0")
    q, px = src.q, src.px
    if a == 0.0:
        return 0.0
    apx = a * px
    c = 1.0 + apx
    a1 = math.log(q) - math.log1p(apx)
    a2 = math.log1p(-q) if q < 1.0 else -math.inf

    e1 = _mi_leg_active(a1, a2, apx)
    e2 = _mi_leg_inactive(a1, a2, apx) if q < 1.0 else 0.0
    val = -(q * e1 + (1.0 - q) * e2) - 1.0
    if -1e-11 < val < 0.0:
        val = 0.0
    return val


def _mi_leg_active(a1, a2, apx):
    """E1 above; splits across the logistic corner once Laguerre cannot see it."""
    c = 1.0 + apx

    def g1(r):
        return np.logaddexp(a1 - r, a2 - c * r)

    if apx <= 20.0:
        val, ok = _gauss_laguerre(g1)
        if ok:
            return val
    # corner at r* where the two exponents cross, width ~ 1/apx
    rstar = (a2 - a1) / apx if np.isfinite(a2) else 0.0
    hi = max(rstar, 0.0) + 46.0 / apx
    edges = _corner_edges(0.0, hi, max(rstar, 0.0), 1.0 / apx, coarse=min(1.0, hi / 4))
    body = _panels(lambda r: g1(r) * np.exp(-r), edges)
    tail = (a1 - hi - 1.0) * math.exp(-hi)
    return body + tail


def _mi_leg_inactive(a1, a2, apx):
    """E2 above; its corner has width >= 1 and is almost always resolvable."""
    c = 1.0 + apx

    def g2(r):
        return np.logaddexp(a1 - r / c, a2 - r)

    val, ok = _gauss_laguerre(g2)
    if ok:
        return val
    rstar = max((a2 - a1) * c / apx, 0.0)
    hi = rstar + 46.0 * c / apx
    edges = _corner_edges(0.0, hi, rstar, c / apx, coarse=min(1.0, hi / 4))
    body = _panels(lambda r: g2(r) * np.exp(-r), edges)
    tail = (a1 - (hi + 1.0) / c) * math.exp(-hi)
    return body + tail


# ---------------------------------------------------------------------------
# Hurwitz-Lerch Phi and the Bernoulli-Gaussian MMSE
# ---------------------------------------------------------------------------

def hurwitz_lerch_phi(z, s, a):
    """Phi(z, s, a) = (1/Gamma(s)) int_0^inf t^{s-1} e^{-a t} / (1 - z e^{-t}) dt.

    Requires z < 1, s > 0, a > 0.  With u = a t the weight becomes the
    generalized Laguerre weight u^{s-1} e^{-u}; the remaining factor
    1/(1 - z e^{-u/a}) is evaluated through the logistic for z < 0 so that
    arbitrarily large |z| cannot overflow.
    """
    if z >= 1.0:
        raise ValueError(f"hurwitz_lerch_phi requires z < 1, got {z}")
    if s <= 0.0 or a <= 0.0:
        raise ValueError("hurwitz_lerch_phi requires s > 0 and a > 0")
    if z == 0.0:
        return a ** (-s)
    lnc = math.log(-z) if z < 0.0 else None

    def g(t):
        if z < 0.0:
            return special.expit(t - lnc)
        return 1.0 / (1.0 - z * np.exp(-t))

    # Laguerre path: valid while the logistic transition (location a*lnc,
    # width a in u-units) sits inside the resolvable node range.
    if a >= 0.25 and (lnc is None or a * max(lnc, 0.0) <= 30.0):
        val, ok = _gauss_laguerre(lambda u: g(u / a), alpha=s - 1.0)
        if ok:
            return val * a ** (-s) / math.gamma(s)

    # split evaluation in t-space: panels over [0, B] plus exact tail
    t0 = max(lnc, 0.0) if lnc is not None else 0.0
    hi = t0 + 46.0
    edges = _corner_edges(0.0, hi, t0, 1.0, coarse=min(0.05 / a, 1.0))
    body = _panels(lambda t: t ** (s - 1.0) * np.exp(-a * t) * g(t), edges)
    tail = math.gamma(s) * a ** (-s) * special.gammaincc(s, a * hi)
    return (body + tail) / math.gamma(s)


def mmse_bg(src, eta):
    """mmse(V0 | V0 + eta^{-1/2} Z) in nats-free units (a variance).

    Closed form via the Hurwitz-Lerch function:
        q [ px - Phi(-(1 + px eta)(1-q)/q, 2, 1/(px eta)) / (eta (1 + px eta)) ].
    Exactly px/(1 + px eta) when q = 1.
    """
    if eta <= 0.0:
        raise ValueError(f"mmse_bg requires eta > 0, got {eta}")
    q, px = src.q, src.px
    pe = px * eta
    if q == 1.0:
        return px / (1.0 + pe)
    phi = hurwitz_lerch_phi(-(1.0 + pe) * (1.0 - q) / q, 2.0, 1.0 / pe)
    return q * (px - phi / (eta * (1.0 + pe)))


# ---------------------------------------------------------------------------
# MAP detector on the decoupled channel
# ---------------------------------------------------------------------------

def posterior_active(ch, y_sq):
    """P[B0 = 1 | |Y|^2 = y_sq] on the decoupled channel."""
    if y_sq < 0.0:
        raise ValueError("y_sq is a squared magnitude and must be >= 0")
    q, px = ch.source.q, ch.source.px
    if q == 1.0:
        return 1.0
    eta = ch.eta
    # 1 / (1 + ((1-q)/q)(1 + eta px) exp(-eta px mu y_sq)), in log space
    t = math.log1p(-q) - math.log(q) + math.log1p(eta * px) - eta * px * ch.mu * y_sq
    return float(special.expit(-t))


def map_threshold(ch):
    """MAP energy-detector threshold tau, or ALWAYS_ACTIVE when q is too large.

    The detector declares B = 1 iff |y|^2 >= tau with
    tau = log((1-q)(1 + eta px)/q) / (eta px mu); once
    q > (1 + eta px)/(2 + eta px) the posterior favours 1 for every y.
    """
    q, px = ch.source.q, ch.source.px
    eta = ch.eta
    if eta <= 0.0:
        raise ValueError("map_threshold requires eta > 0")
    pe = eta * px
    if q > (1.0 + pe) / (2.0 + pe):
        return ALWAYS_ACTIVE
    return (math.log1p(-q) - math.log(q) + math.log1p(pe)) / (pe * ch.mu)


def support_error_rate(ch):
    """Error rate of the MAP energy detector on the decoupled channel.

    q (1 - e^{-mu tau}) + (1-q) e^{-eta tau}; equals 1 - q on the
    always-active branch (the detector never declares a zero).
    """
    q = ch.source.q
    tau = map_threshold(ch)
    if tau is ALWAYS_ACTIVE:
        return 1.0 - q
    return -q * math.expm1(-ch.mu * tau) + (1.0 - q) * math.exp(-ch.eta * tau)

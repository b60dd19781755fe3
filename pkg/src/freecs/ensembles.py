"""Spectral-transform calculus for the two sensing-matrix ensembles.

The observed Gram matrix of the sampled sensing operator has a limiting
spectral law that depends only on the sampling rate p and on whether the
mixing matrix is iid (variance 1/n entries) or Haar unitary:

* ``haar``  -- the spectrum is Bernoulli-p (a random projection),
* ``iid``   -- the spectrum is that of H H^+ with H of shape n x pn and
  iid entries of variance 1/n (a Marchenko-Pastur-type law).

Everything downstream (replica fixed points, information bounds, decoupled
channels) consumes this law only through its R-transform, eta-transform and
Shannon transform, all of which are available in closed form and are
implemented here with numerically stable branches.  All logarithms are
natural; unit conversion is a reporting concern.
"""

import math
from dataclasses import dataclass

__all__ = [
    "Ensemble",
    "iid",
    "haar",
    "r_transform",
    "r_transform_derivative",
    "r_transform_integral",
    "r_transform_inverse",
    "eta_transform",
    "shannon_transform",
    "spectrum_mean",
    "sic_multiuser_efficiency",
]

_KINDS = ("iid", "haar")

# Treat p this close to 1 as the identity ensemble: the Haar formulas have a
# discontinuous p -> 1 limit on their secondary branch, so the exact p = 1
# expressions are used instead.
_P_ONE_EPS = 1e-12


@dataclass(frozen=True)
class Ensemble:
    """A sensing ensemble: matrix kind plus sampling rate p in [0, 1]."""

    kind: str
    p: float

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"sampling rate p={self.p} outside [0, 1]")

    @property
    def is_identity(self):
        """True when the ensemble degenerates to A = I (Haar with p = 1)."""
        return self.kind == "haar" and self.p >= 1.0 - _P_ONE_EPS


def iid(p):
    """Ensemble with iid variance-1/n mixing matrix at sampling rate p."""
    return Ensemble("iid", float(p))


def haar(p):
    """Ensemble with Haar-unitary mixing matrix at sampling rate p."""
    return Ensemble("haar", float(p))


def r_transform(e, z):
    """R-transform of the sampled Gram matrix, evaluated at z <= 0.

    iid:  p / (1 - z).
    haar: (z - 1 + sqrt((z-1)^2 + 4 z p)) / (2 z), written in the conjugate
    form 2p / (1 - z + sqrt((z-1)^2 + 4 z p)) which is exact at z = 0 and
    avoids the cancellation between z - 1 and the root.
    """
    p = e.p
    if e.kind == "iid":
        if z == 1.0:
            raise ValueError("iid R-transform has a pole at z = 1")
        return p / (1.0 - z)
    if e.is_identity:
        return 1.0
    disc = (z - 1.0) ** 2 + 4.0 * z * p
    if disc < 0.0:
        raise ValueError(f"R-transform square root negative at z={z}, p={p}")
    return 2.0 * p / (1.0 - z + math.sqrt(disc))


def r_transform_derivative(e, z):
    """Analytic first derivative of the R-transform at z."""
    p = e.p
    if e.kind == "iid":
        return p / (1.0 - z) ** 2
    if e.is_identity:
        return 0.0
    disc = (z - 1.0) ** 2 + 4.0 * z * p
    if disc < 0.0:
        raise ValueError(f"R-transform square root negative at z={z}, p={p}")
    s = math.sqrt(disc)
    if s == 0.0:
        raise ValueError(f"R-transform derivative singular at z={z}, p={p}")
    # d/dz [2p / (1 - z + s)] with s' = (z - 1 + 2p) / s
    sp = (z - 1.0 + 2.0 * p) / s
    return 2.0 * p * (1.0 - sp) / (1.0 - z + s) ** 2


def r_transform_integral(e, chi):
    """Closed form of int_0^chi R(-w) dw.

    iid: p log(1 + chi).  haar: the explicit antiderivative in terms of
    rho = sqrt((1 + chi)^2 - 4 chi p).  The identity ensemble integrates the
    constant 1.
    """
    if chi < 0.0:
        raise ValueError("chi must be nonnegative")
    p = e.p
    if chi == 0.0 or p == 0.0:
        return 0.0
    if e.kind == "iid":
        return p * math.log1p(chi)
    if e.is_identity:
        return float(chi)
    rho = math.sqrt((1.0 + chi) ** 2 - 4.0 * chi * p)
    return 0.5 * (
        1.0
        + chi
        - rho
        - 2.0 * p * math.log(2.0 * (1.0 - p))
        + math.log(1.0 - p)
        - (1.0 - 2.0 * p) * math.log(1.0 + chi - 2.0 * p + rho)
        + math.log(1.0 + chi * (1.0 - 2.0 * p) + rho)
    )


def r_transform_inverse(e, eta):
    """z with R(z) = eta.  iid: 1 - p/eta.  haar: (eta - p)/(eta (1 - eta))."""
    if eta <= 0.0:
        raise ValueError("R-transform inverse requires eta > 0")
    p = e.p
    if e.kind == "iid":
        return 1.0 - p / eta
    if e.is_identity:
        raise ValueError("identity ensemble has constant R-transform")
    if eta >= 1.0:
        # the haar R-transform has range (0, 1): R -> 1 only as z -> +inf
        raise ValueError(f"eta={eta} outside the haar R-transform range (0, 1)")
    return (eta - p) / (eta * (1.0 - eta))


def eta_transform(e, x):
    """eta-transform of the spectral law at x >= 0; value in (1 - p, 1].

    haar: 1 - p + p/(1 + x).  iid: positive root of the quadratic
    x eta^2 - ((1-p) x - 1) eta - 1 = 0, evaluated on the branch that avoids
    cancellation on either side of the vertex.
    """
    if x < 0.0:
        raise ValueError("eta-transform requires x >= 0")
    p = e.p
    if x == 0.0:
        return 1.0
    if e.kind == "haar":
        return 1.0 - p + p / (1.0 + x)
    b = (1.0 - p) * x - 1.0
    disc = math.sqrt(b * b + 4.0 * x)
    if b > 0.0:
        return (b + disc) / (2.0 * x)
    return 2.0 / (disc - b)


def shannon_transform(e, s):
    """Shannon transform E[log(1 + s X)] of the spectral law, in nats.

    haar: p log(1 + s) (Bernoulli-p spectrum).  iid: the classical closed
    form for an n x pn iid matrix with variance-1/n entries,
    p log(1 + s - F/4) + log(1 + p s - F/4) - F/(4s) with
    F = (sqrt(s (1+sqrt(p))^2 + 1) - sqrt(s (1-sqrt(p))^2 + 1))^2.
    """
    if s < 0.0:
        raise ValueError("Shannon transform requires s >= 0")
    p = e.p
    if s == 0.0 or p == 0.0:
        return 0.0
    if e.kind == "haar":
        return p * math.log1p(s)
    f4 = _mp_f(s, p) / 4.0
    return (
        p * math.log1p(s - f4)
        + math.log1p(p * s - f4)
        - f4 / s
    )


def _mp_f(x, y):
    """Marchenko-Pastur auxiliary F(x, y); stable for small and large x."""
    sy = math.sqrt(y)
    a = x * (1.0 + sy) ** 2 + 1.0
    b = x * (1.0 - sy) ** 2 + 1.0
    # (sqrt(a) - sqrt(b))^2 = (a - b)^2 / (sqrt(a) + sqrt(b))^2, cancellation-free
    return (4.0 * x * sy) ** 2 / (math.sqrt(a) + math.sqrt(b)) ** 2


def spectrum_mean(e):
    """Mean of the limiting spectrum, E[|R|^2] = p for both ensembles."""
    return e.p


def sic_multiuser_efficiency(e, s, beta):
    """Multiuser efficiency eta(s; beta) of LMMSE with successive cancellation.

    beta is the fraction of not-yet-cancelled users; beta = 0 gives p exactly
    and, for the haar kind, beta -> 1 gives p / (1 + (1-p) s).  Both closed
    forms are evaluated through the conjugate of the quadratic root, which is
    finite at beta = 1 and s = 0 without special-casing.
    """
    if s < 0.0:
        raise ValueError("sic efficiency requires s >= 0")
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    p = e.p
    if p == 0.0:
        return 0.0
    if s == 0.0:
        return p
    a = (p - beta) * s - 1.0
    if e.kind == "iid":
        disc = math.sqrt(a * a + 4.0 * p * s)
    else:
        disc = math.sqrt(a * a + 4.0 * (1.0 - beta) * p * s)
    if a > 0.0:
        # direct form is stable when a > 0 (only possible for beta < p)
        den = 2.0 * s if e.kind == "iid" else 2.0 * (1.0 - beta) * s
        return (a + disc) / den
    return 2.0 * p / (disc - a)

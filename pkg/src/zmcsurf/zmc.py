"""Graph jets, the three graph ZMC residuals, and a signature-aware parametric check.

The graph equations are evaluated with verbatim coefficient placement:

    minimal     (1 + z_x^2) z_yy - 2 z_x z_y z_xy + (1 + z_y^2) z_xx = 0
    maximal     (1 - z_x^2) z_yy + 2 z_x z_y z_xy + (1 - z_y^2) z_xx = 0
    bi-soliton  (1 - z_y^2) z_xx + 2 z_x z_y z_xy - (1 + z_x^2) z_yy = 0

Graph residuals are reported unnormalized (directly comparable across grids);
the parametric mean-curvature numerator is normalized to be scale-comparable.
There is no graph equation for timelike minimal surfaces here; those get only
the parametric check with metric diag(1, 1, -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .errors import DomainViolation, EmptyGrid
from .report import VerificationReport

__all__ = [
    "GraphJet",
    "SignatureMetric",
    "EUCLID3",
    "LORENTZ3",
    "LORENTZ3_PRIME",
    "EQUATIONS",
    "ExactUnavailable",
    "DegenerateMetric",
    "graph_jet",
    "graph_residual",
    "parametric_zmc_numerator",
    "graph_jet_from_parametric",
    "residual_sweep",
    "parametric_sweep",
    "GraphLiftSampler",
]

EQUATIONS = ("minimal", "maximal", "bi-soliton")


class ExactUnavailable(RuntimeError):
    """The surface has no closed-form jet; the caller must opt into central-diff."""


class DegenerateMetric(ArithmeticError):
    """First fundamental form numerically degenerate (|EG - F^2| ~ 0)."""


@dataclass(frozen=True)
class GraphJet:
    """Second-order jet of a height function z = Z(x, y).

    Entries are floats for real probes and complex for complexified probes;
    z_xy is the single mixed value (mixed partials symmetric by construction).
    """

    z: complex
    z_x: complex
    z_y: complex
    z_xx: complex
    z_xy: complex
    z_yy: complex


def graph_residual(eq: str, jet: GraphJet):
    """Left-hand side of the selected graph ZMC equation at the jet."""
    zx, zy = jet.z_x, jet.z_y
    zxx, zxy, zyy = jet.z_xx, jet.z_xy, jet.z_yy
    if eq == "minimal":
        return (1 + zx * zx) * zyy - 2 * zx * zy * zxy + (1 + zy * zy) * zxx
    if eq == "maximal":
        return (1 - zx * zx) * zyy + 2 * zx * zy * zxy + (1 - zy * zy) * zxx
    if eq in ("bi-soliton", "bi"):
        return (1 - zy * zy) * zxx + 2 * zx * zy * zxy - (1 + zx * zx) * zyy
    raise ValueError(f"unknown equation {eq!r}; expected one of {EQUATIONS}")


# 5-point central-difference coefficients for f' (divide by 12h) and the
# offsets they belong to.
_D1 = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))


def _stencil_points(x, y, h):
    for di in range(-2, 3):
        for dj in range(-2, 3):
            yield x + di * h, y + dj * h


def graph_jet(surface, x: float, y: float, method: str = "exact", h: float = 1e-4) -> GraphJet:
    """Second-order jet of a height surface at (x, y).

    ``method="exact"`` uses the surface's closed-form/symbolic jet and raises
    ExactUnavailable when there is none (no silent fallback: the caller
    chooses).  ``method="central-diff"`` uses 5-point stencils with step h.
    """
    if method == "exact":
        jet_fn = getattr(surface, "exact_jet", None)
        if jet_fn is None:
            raise ExactUnavailable(f"surface {getattr(surface, 'id', surface)!r} has no exact jet")
        return jet_fn(x, y)
    if method != "central-diff":
        raise ValueError(f"unknown jet method {method!r}")

    domain_ok = getattr(surface, "domain_ok", None)
    if domain_ok is not None:
        bad = [(px, py) for px, py in _stencil_points(x, y, h) if not domain_ok(px, py, 0.0)]
        if bad:
            raise DomainViolation(f"stencil leaves the domain of {surface.id!r}", bad[:5])

    f = surface.height_at
    z = f(x, y)
    zx = sum(c * f(x + d * h, y) for d, c in _D1) / (12 * h)
    zy = sum(c * f(x, y + d * h) for d, c in _D1) / (12 * h)
    zxx = (-f(x + 2 * h, y) + 16 * f(x + h, y) - 30 * z
           + 16 * f(x - h, y) - f(x - 2 * h, y)) / (12 * h * h)
    zyy = (-f(x, y + 2 * h) + 16 * f(x, y + h) - 30 * z
           + 16 * f(x, y - h) - f(x, y - 2 * h)) / (12 * h * h)
    zxy = sum(ci * cj * f(x + di * h, y + dj * h)
              for di, ci in _D1 for dj, cj in _D1) / (144 * h * h)
    return GraphJet(z, zx, zy, zxx, zxy, zyy)


# ---------------------------------------------------------------------------
# signature metrics and the parametric ZMC numerator
# ---------------------------------------------------------------------------

_ALLOWED_SIGNS = {(1, 1, 1), (1, 1, -1), (1, -1, 1)}


@dataclass(frozen=True)
class SignatureMetric:
    """Diagonal ambient metric; exactly one of diag(1,1,1), diag(1,1,-1), diag(1,-1,1)."""

    signs: tuple

    def __post_init__(self):
        if tuple(self.signs) not in _ALLOWED_SIGNS:
            raise ValueError(f"unsupported metric signature {self.signs!r}")

    def inner(self, a, b) -> float:
        s = self.signs
        return s[0] * a[0] * b[0] + s[1] * a[1] * b[1] + s[2] * a[2] * b[2]

    def pseudo_normal(self, a, b):
        """diag(signs) applied to the Euclidean cross product a x b."""
        cx = a[1] * b[2] - a[2] * b[1]
        cy = a[2] * b[0] - a[0] * b[2]
        cz = a[0] * b[1] - a[1] * b[0]
        s = self.signs
        return (s[0] * cx, s[1] * cy, s[2] * cz)


EUCLID3 = SignatureMetric((1, 1, 1))
LORENTZ3 = SignatureMetric((1, 1, -1))
LORENTZ3_PRIME = SignatureMetric((1, -1, 1))

METRIC_NAMES = {"euclid": EUCLID3, "l3": LORENTZ3, "l3p": LORENTZ3_PRIME}


def _fd_parametric_jet(point_fn, u, v, h):
    def p(uu, vv):
        return np.asarray(point_fn(uu, vv), dtype=float)

    x = p(u, v)
    xu = sum(c * p(u + d * h, v) for d, c in _D1) / (12 * h)
    xv = sum(c * p(u, v + d * h) for d, c in _D1) / (12 * h)
    xuu = (-p(u + 2 * h, v) + 16 * p(u + h, v) - 30 * x
           + 16 * p(u - h, v) - p(u - 2 * h, v)) / (12 * h * h)
    xvv = (-p(u, v + 2 * h) + 16 * p(u, v + h) - 30 * x
           + 16 * p(u, v - h) - p(u, v - 2 * h)) / (12 * h * h)
    xuv = sum(ci * cj * p(u + di * h, v + dj * h)
              for di, ci in _D1 for dj, cj in _D1) / (144 * h * h)
    return x, xu, xv, xuu, xuv, xvv


def parametric_zmc_numerator(sampler, metric: SignatureMetric, u: float, v: float,
                             h: float = 1e-4, use_exact_jet: bool = True) -> float:
    """Normalized mean-curvature numerator E<X_vv,N> - 2F<X_uv,N> + G<X_uu,N>.

    Uses the sampler's exact jet when it exposes one (and ``use_exact_jet``),
    otherwise 5-point central differences of ``sampler.point``.  Normalization
    by (|E|+|F|+|G|) * |N|_euclid makes values scale-comparable.
    """
    if use_exact_jet and hasattr(sampler, "jet"):
        x, xu, xv, xuu, xuv, xvv = sampler.jet(u, v)
    else:
        x, xu, xv, xuu, xuv, xvv = _fd_parametric_jet(sampler.point, u, v, h)

    E = metric.inner(xu, xu)
    F = metric.inner(xu, xv)
    G = metric.inner(xv, xv)
    scale = (abs(E) + abs(F) + abs(G)) ** 2
    if scale == 0 or abs(E * G - F * F) < 1e-12 * scale:
        raise DegenerateMetric(f"first fundamental form degenerate at ({u}, {v})")

    n = metric.pseudo_normal(xu, xv)
    n_norm = math.sqrt(n[0] ** 2 + n[1] ** 2 + n[2] ** 2)
    numerator = (E * metric.inner(xvv, n)
                 - 2 * F * metric.inner(xuv, n)
                 + G * metric.inner(xuu, n))
    return numerator / ((abs(E) + abs(F) + abs(G)) * n_norm)


def graph_jet_from_parametric(x, xu, xv, xuu, xuv, xvv) -> GraphJet:
    """Jet of the local graph z = z(x, y) implied by a parametric jet.

    Solves the chain-rule systems; raises DegenerateMetric when the (x, y)
    Jacobian is singular (the surface is not a graph over (x, y) there).
    """
    jac = np.array([[xu[0], xv[0]], [xu[1], xv[1]]], dtype=float)
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    if abs(det) < 1e-14:
        raise DegenerateMetric("surface is not a graph over (x, y) here")
    z_x, z_y = np.linalg.solve(jac.T, np.array([xu[2], xv[2]]))

    # Second derivatives: subtract the first-order transport, then solve the
    # 3x3 quadratic-form system for (z_xx, z_xy, z_yy).
    rhs = np.array([
        xuu[2] - z_x * xuu[0] - z_y * xuu[1],
        xuv[2] - z_x * xuv[0] - z_y * xuv[1],
        xvv[2] - z_x * xvv[0] - z_y * xvv[1],
    ])
    a = np.array([
        [xu[0] ** 2, 2 * xu[0] * xu[1], xu[1] ** 2],
        [xu[0] * xv[0], xu[0] * xv[1] + xv[0] * xu[1], xu[1] * xv[1]],
        [xv[0] ** 2, 2 * xv[0] * xv[1], xv[1] ** 2],
    ])
    z_xx, z_xy, z_yy = np.linalg.solve(a, rhs)
    return GraphJet(x[2], float(z_x), float(z_y), float(z_xx), float(z_xy), float(z_yy))


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def residual_sweep(surface, eq: str, grid, method: str = "exact", h: float = 1e-4,
                   tolerance: float = 1e-10) -> VerificationReport:
    """Max/mean |graph residual| over a lattice that must lie in the domain."""
    bad = [(u, v) for _, (u, v) in grid.points() if not surface.domain_ok(u, v, grid.margin)]
    if bad:
        raise DomainViolation(
            f"{len(bad)} grid points violate the domain of {surface.id!r}", bad[:10])

    worst = None
    max_err = 0.0
    total = 0.0
    count = 0
    for _, (u, v) in grid.points():
        jet = graph_jet(surface, u, v, method=method, h=h)
        r = graph_residual(eq, jet)
        err = abs(r)
        total += err
        count += 1
        if err >= max_err:
            max_err = err
            worst = {"coords": [u, v], "lhs": r, "rhs": 0.0}
    if count == 0:
        raise EmptyGrid("no points in residual sweep")
    return VerificationReport(
        subject=f"residual:{eq}:{surface.id}",
        parameters={"equation": eq, "surface": surface.id, "method": method, "h": h},
        grid=grid,
        points_checked=count,
        max_abs_err=max_err,
        mean_abs_err=total / count,
        worst_point=worst,
        policy="unnormalized",
        tolerance=tolerance,
    )


def parametric_sweep(sampler, metric: SignatureMetric, grid, h: float = 1e-4,
                     tolerance: float = 1e-6, use_exact_jet: bool = True,
                     subject: str = "parametric-zmc") -> VerificationReport:
    """Max/mean |normalized parametric ZMC numerator| over a (u, v) lattice."""
    worst = None
    max_err = 0.0
    total = 0.0
    count = 0
    for _, (u, v) in grid.points():
        value = parametric_zmc_numerator(sampler, metric, u, v, h=h,
                                         use_exact_jet=use_exact_jet)
        err = abs(value)
        total += err
        count += 1
        if err >= max_err:
            max_err = err
            worst = {"coords": [u, v], "lhs": value, "rhs": 0.0}
    if count == 0:
        raise EmptyGrid("no points in parametric sweep")
    return VerificationReport(
        subject=subject,
        parameters={"metric": list(metric.signs), "h": h,
                    "jets": "exact" if use_exact_jet else "central-diff"},
        grid=grid,
        points_checked=count,
        max_abs_err=max_err,
        mean_abs_err=total / count,
        worst_point=worst,
        policy="normalized",
        tolerance=tolerance,
    )


class GraphLiftSampler:
    """Parametric view (x, y) -> (x, y, Z(x, y)) of a height surface.

    The ``jet`` attribute is bound only when the surface has an exact jet and
    ``expose_jet`` is true; otherwise the parametric checker falls back to
    central differences of ``point``.
    """

    def __init__(self, surface, expose_jet: bool = True):
        self.surface = surface
        if expose_jet and getattr(surface, "exact_jet", None) is not None:
            self.jet = self._exact_jet

    def point(self, u, v):
        return (u, v, self.surface.height_at(u, v))

    def _exact_jet(self, u, v):
        j = self.surface.exact_jet(u, v)
        return (
            (u, v, j.z),
            (1.0, 0.0, j.z_x),
            (0.0, 1.0, j.z_y),
            (0.0, 0.0, j.z_xx),
            (0.0, 0.0, j.z_xy),
            (0.0, 0.0, j.z_yy),
        )

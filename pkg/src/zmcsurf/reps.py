"""Integral representations of ZMC surfaces and their decompositions.

Four representations are implemented:

* minimal graphs from holomorphic data (f, g), integrands
  ((1-g^2)f, i(1+g^2)f, 2gf), real parts of straight-path integrals;
* maximal graphs with integrands ((1+g^2)f, i(1-g^2)f, -2gf);
* the reduced single-function form (mode ``reduced-R``), where f plays the
  role of the non-vanishing density R and g is pinned to the identity map;
* timelike-minimal and Born-Infeld translation surfaces built from two
  one-variable data sets integrated independently.

The timelike representation is assembled so that both generating curves are
null for the metric diag(1, 1, -1): with projected Gauss map (q, r) and
densities f(u), g(v),

    x(u, v) = -I_u[q f]          + I_v[r g]
    y(u, v) = -(I_u[(1-q^2) f] + I_v[(1-r^2) g]) / 2
    z(u, v) =  (I_u[(1+q^2) f] - I_v[(1+r^2) g]) / 2

which makes the surface zero-mean-curvature by construction (translation
surface of null curves).  All samplers expose exact derivative jets: the
derivative of a path integral is its integrand, so jets need no quadrature.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .expr import AnalyticExpr, Binary, Const, EvalDomainError, Power, Unary, Var, parse
from .report import VerificationReport

__all__ = [
    "SingularPath",
    "NoConvergence",
    "ZeroWeight",
    "WeightSumError",
    "NewtonDiverged",
    "JacobianSingular",
    "WEData",
    "TLMSData",
    "BCData",
    "we_point",
    "associated_family_point",
    "split_weierstrass",
    "split_weierstrass_expressions",
    "verify_split",
    "invert_parametrization",
    "tlms_point",
    "bc_point",
    "WESampler",
    "TLMSSampler",
    "BCSampler",
    "InvertedGraphSampler",
    "integrate_segment",
]

WE_MODES = ("minimal", "maximal", "reduced-R")


class SingularPath(ArithmeticError):
    """An integrand blew up (pole/branch point/overflow) at a quadrature node."""


class NoConvergence(ArithmeticError):
    """Composite quadrature did not settle within the segment cap."""


class ZeroWeight(ValueError):
    """Splitting weights must be nonzero (scalar multiples of R must not vanish)."""


class WeightSumError(ValueError):
    """Splitting weights must sum to one."""


class NewtonDiverged(ArithmeticError):
    """Newton inversion hit the iteration cap or could not reduce the residual."""


class JacobianSingular(ArithmeticError):
    """The (x, y)-Jacobian is numerically singular: the surface is not a graph here."""


# ---------------------------------------------------------------------------
# composite Gauss-Legendre quadrature along straight segments
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
_GL_NODES = tuple(float(t) for t in _GL_NODES)
_GL_WEIGHTS = tuple(float(w) for w in _GL_WEIGHTS)


def integrate_segment(integrands: Sequence[AnalyticExpr], z0: complex, z1: complex,
                      tol: float = 1e-10, max_segments: int = 1024):
    """Integrate each expression along the straight segment [z0, z1].

    32-node Gauss-Legendre per segment; the segment count doubles until two
    successive refinements agree within ``tol`` (NoConvergence past
    ``max_segments``).  Singularities are detected by sampling: any node where
    an integrand fails to evaluate finitely raises SingularPath.
    """
    z0 = complex(z0)
    z1 = complex(z1)
    if z0 == z1:
        return [0j for _ in integrands]
    delta = z1 - z0

    def composite(nseg: int):
        acc = [0j for _ in integrands]
        for seg in range(nseg):
            mid = (seg + 0.5) / nseg
            half = 0.5 / nseg
            for node, weight in zip(_GL_NODES, _GL_WEIGHTS):
                t = mid + half * node
                w = z0 + t * delta
                for idx, e in enumerate(integrands):
                    try:
                        val = e.eval(w)
                    except EvalDomainError as exc:
                        raise SingularPath(
                            f"integrand singular at node {w!r}: {exc}") from exc
                    acc[idx] += weight * half * val
        return [delta * v for v in acc]

    prev = composite(1)
    nseg = 2
    while nseg <= max_segments:
        cur = composite(nseg)
        if max(abs(c - p) for c, p in zip(cur, prev)) < tol:
            return cur
        prev = cur
        nseg *= 2
    raise NoConvergence(
        f"quadrature on [{z0!r}, {z1!r}] did not converge within {max_segments} segments")


def _mul(*nodes):
    out = nodes[0]
    for n in nodes[1:]:
        out = Binary("mul", out, n)
    return out


_ONE = Const(1 + 0j)
_TWO = Const(2 + 0j)
_I = Const(1j)


# ---------------------------------------------------------------------------
# Weierstrass-Enneper data (minimal / maximal / reduced)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WEData:
    """Representation data: holomorphic f, meromorphic g (f*g^2 finite on the
    working domain, enforced by sampling), basepoint, offset, and mode."""

    f: AnalyticExpr
    g: AnalyticExpr
    zeta0: complex = 0j
    offset: tuple = (0.0, 0.0, 0.0)
    mode: str = "minimal"

    def __post_init__(self):
        if self.mode not in WE_MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {WE_MODES}")
        if self.f.varname != self.g.varname:
            raise ValueError("f and g must share one free variable")
        if self.mode == "reduced-R" and self.g.root != Var(self.f.varname):
            raise ValueError("reduced-R mode pins g to the identity map")

    @classmethod
    def from_text(cls, f_text: str, g_text: str, zeta0=0j, offset=(0.0, 0.0, 0.0),
                  mode: str = "minimal", varname: str = "w") -> "WEData":
        return cls(parse(f_text, varname), parse(g_text, varname), complex(zeta0),
                   tuple(float(v) for v in offset), mode)

    @classmethod
    def reduced(cls, r_text: str, zeta0=0j, offset=(0.0, 0.0, 0.0),
                varname: str = "w") -> "WEData":
        return cls(parse(r_text, varname), parse(varname, varname), complex(zeta0),
                   tuple(float(v) for v in offset), "reduced-R")

    @cached_property
    def integrands(self):
        w = self.f.varname
        f = self.f.root
        g = self.g.root
        g2 = Power(g, 2)
        if self.mode == "maximal":
            phi = (
                _mul(Binary("add", _ONE, g2), f),
                _mul(_I, Binary("sub", _ONE, g2), f),
                Unary("neg", _mul(_TWO, g, f)),
            )
        else:  # minimal and reduced-R share the integrand shape
            phi = (
                _mul(Binary("sub", _ONE, g2), f),
                _mul(_I, Binary("add", _ONE, g2), f),
                _mul(_TWO, g, f),
            )
        return tuple(AnalyticExpr(p, w) for p in phi)

    @cached_property
    def integrand_derivatives(self):
        return tuple(e.derivative() for e in self.integrands)


def _we_integrals(data: WEData, zeta: complex, tol: float = 1e-10):
    return integrate_segment(data.integrands, data.zeta0, complex(zeta), tol=tol)


def we_point(data: WEData, zeta: complex, tol: float = 1e-10):
    """Surface point offset + Re of the straight-path integral triple."""
    ints = _we_integrals(data, zeta, tol)
    x0, y0, z0 = data.offset
    return (x0 + ints[0].real, y0 + ints[1].real, z0 + ints[2].real)


def associated_family_point(data: WEData, zeta: complex, theta: float,
                            tol: float = 1e-10):
    """cos(theta) * X + sin(theta) * X^c, where X^c takes Im of the same integrals."""
    ints = _we_integrals(data, zeta, tol)
    ct, st = math.cos(theta), math.sin(theta)
    return tuple(ct * (x0 + v.real) + st * (x0 + v.imag)
                 for x0, v in zip(data.offset, ints))


def split_weierstrass(data: WEData, weights: Sequence[float]):
    """Split reduced data R into scalar multiples lambda_i * R (offsets zeroed).

    Scalar multiples of a non-vanishing R are automatically non-vanishing;
    with zero offsets the height functions satisfy sum_i z_i = z exactly.
    """
    if data.mode != "reduced-R":
        raise ValueError("splitting is defined for reduced-R data")
    lams = [float(v) for v in weights]
    if not lams:
        raise ZeroWeight("need at least one weight")
    if any(v == 0.0 for v in lams):
        raise ZeroWeight(f"weights must be nonzero, got {lams}")
    if abs(sum(lams) - 1.0) > 1e-12:
        raise WeightSumError(f"weights must sum to 1, got sum = {sum(lams)!r}")
    out = []
    for lam in lams:
        scaled = AnalyticExpr(Binary("mul", Const(complex(lam)), data.f.root),
                              data.f.varname)
        out.append(replace(data, f=scaled, offset=(0.0, 0.0, 0.0)))
    return out


def split_weierstrass_expressions(data: WEData, pieces: Sequence,
                                  lattice: int = 32, radius: float = 0.8):
    """Split reduced data into arbitrary expression pieces R = R_1 + ... + R_n.

    Whether an arbitrary expression vanishes cannot be decided symbolically,
    so both requirements are checked only by sampling a ``lattice x lattice``
    grid (~10^3 points) on the disk of ``radius`` around the basepoint:

    * the pieces must sum to R at every sampled point (WeightSumError);
    * no piece may come close to vanishing: a zero inside the disk drives the
      sampled minimum of |R_i| far below its sampled median, so
      min < 0.08 * median is treated as vanishing (ZeroWeight).  This is a
      heuristic with margin-of-the-disk false positives by design.

    Offsets of the output data are zeroed, as in the scalar-weight split.
    """
    if data.mode != "reduced-R":
        raise ValueError("splitting is defined for reduced-R data")
    varname = data.f.varname
    exprs = [p if isinstance(p, AnalyticExpr) else parse(p, varname) for p in pieces]
    if not exprs:
        raise ZeroWeight("need at least one piece")

    magnitudes = [[] for _ in exprs]
    step = 2.0 * radius / (lattice - 1)
    for i in range(lattice):
        for j in range(lattice):
            w = data.zeta0 + complex(-radius + i * step, -radius + j * step)
            if abs(w - data.zeta0) > radius:
                continue
            try:
                total = data.f.eval(w)
                values = [e.eval(w) for e in exprs]
            except EvalDomainError:
                continue
            if abs(sum(values) - total) > 1e-10 * (1.0 + abs(total)):
                raise WeightSumError(
                    f"pieces do not sum to R at {w!r}: {sum(values)!r} != {total!r}")
            for mags, value in zip(magnitudes, values):
                mags.append(abs(value))
    for e, mags in zip(exprs, magnitudes):
        if not mags:
            raise ZeroWeight(f"piece {e.source()} never evaluated on the sample disk")
        ordered = sorted(mags)
        median = ordered[len(ordered) // 2]
        if ordered[0] < max(1e-9, 0.08 * median):
            raise ZeroWeight(
                f"piece {e.source()} vanishes (or nearly) on the sample disk: "
                f"min |R_i| = {ordered[0]:.3e} vs median {median:.3e}")
    return [replace(data, f=e, offset=(0.0, 0.0, 0.0)) for e in exprs]


def verify_split(data: WEData, weights: Sequence[float] = None, n_samples: int = 50,
                 radius: float = 0.8, seed: int = 20240801,
                 tolerance: float = 1e-10, pieces: Sequence = None) -> VerificationReport:
    """Check sum_i z_i = z at random probes around the basepoint."""
    if pieces is not None:
        split = split_weierstrass_expressions(data, pieces, radius=radius)
        label = {"pieces": [p.f.source() for p in split]}
    else:
        split = split_weierstrass(data, weights)
        label = {"weights": list(weights)}
    base = replace(data, offset=(0.0, 0.0, 0.0))
    rng = random.Random(seed)
    max_err = -1.0
    total = 0.0
    worst = None
    for _ in range(n_samples):
        r = radius * math.sqrt(rng.random())
        phi = 2 * math.pi * rng.random()
        zeta = data.zeta0 + r * cmath.exp(1j * phi)
        z_parent = we_point(base, zeta)[2]
        z_sum = sum(we_point(p, zeta)[2] for p in split)
        err = abs(z_parent - z_sum)
        total += err
        if err > max_err:
            max_err = err
            worst = {"coords": [zeta.real, zeta.imag], "lhs": z_parent, "rhs": z_sum}
    return VerificationReport(
        subject="we-split",
        parameters={**label, "samples": n_samples, "radius": radius,
                    "seed": seed, "mode": data.mode},
        grid=None,
        points_checked=n_samples,
        max_abs_err=max_err,
        mean_abs_err=total / n_samples,
        worst_point=worst,
        policy="principal",
        tolerance=tolerance,
    )


def invert_parametrization(data: WEData, x: float, y: float, zeta_guess: complex,
                           max_iter: int = 50, update_tol: float = 1e-12,
                           residual_tol: float = 1e-10) -> complex:
    """Damped Newton for zeta with (x(zeta), y(zeta)) = (x, y).

    The Jacobian is exact (the derivative of the integral is the integrand);
    steps are halved up to 20 times when the residual does not decrease.
    """
    phi1, phi2 = data.integrands[0], data.integrands[1]

    def residual(z):
        px, py, _ = we_point(data, z)
        return px - x, py - y

    z = complex(zeta_guess)
    fx, fy = residual(z)
    converged = False
    for _ in range(max_iter):
        p1 = phi1.eval(z)
        p2 = phi2.eval(z)
        j00, j01 = p1.real, -p1.imag
        j10, j11 = p2.real, -p2.imag
        det = j00 * j11 - j01 * j10
        if abs(det) < 1e-14:
            raise JacobianSingular(
                f"|det| = {abs(det):.3e} at zeta = {z!r} (R vanishes or the graph folds)")
        d1 = (-fx * j11 + fy * j01) / det
        d2 = (-fy * j00 + fx * j10) / det
        step = complex(d1, d2)
        lam = 1.0
        accepted = False
        norm0 = math.hypot(fx, fy)
        for _ in range(20):
            z_new = z + lam * step
            gx, gy = residual(z_new)
            if math.hypot(gx, gy) < norm0 or math.hypot(gx, gy) <= residual_tol:
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            raise NewtonDiverged("residual did not decrease after 20 step halvings")
        z = z_new
        fx, fy = gx, gy
        if lam * abs(step) < update_tol or math.hypot(fx, fy) <= 1e-13:
            converged = True
            break
    if not converged:
        raise NewtonDiverged(f"no convergence within {max_iter} iterations")
    if math.hypot(fx, fy) > residual_tol:
        raise NewtonDiverged(
            f"converged update but residual {math.hypot(fx, fy):.3e} > {residual_tol}")
    return z


class WESampler:
    """Parametric sampler (zeta1, zeta2) -> X^theta with exact jets.

    theta = 0 is the surface itself, theta = pi/2 its conjugate; every member
    of the family is ZMC for the mode's ambient metric.
    """

    def __init__(self, data: WEData, theta: float = 0.0, tol: float = 1e-10):
        self.data = data
        self.theta = float(theta)
        self.tol = tol
        self._ct = math.cos(self.theta)
        self._st = math.sin(self.theta)

    def _functional(self, value: complex) -> float:
        return self._ct * value.real + self._st * value.imag

    def point(self, u: float, v: float):
        zeta = complex(u, v)
        ints = _we_integrals(self.data, zeta, self.tol)
        return tuple(self._ct * (x0 + w.real) + self._st * (x0 + w.imag)
                     for x0, w in zip(self.data.offset, ints))

    def jet(self, u: float, v: float):
        zeta = complex(u, v)
        x = self.point(u, v)
        phi = [e.eval(zeta) for e in self.data.integrands]
        dphi = [e.eval(zeta) for e in self.data.integrand_derivatives]
        xu = tuple(self._functional(p) for p in phi)
        xv = tuple(self._functional(1j * p) for p in phi)
        xuu = tuple(self._functional(dp) for dp in dphi)
        xuv = tuple(self._functional(1j * dp) for dp in dphi)
        xvv = tuple(-self._functional(dp) for dp in dphi)
        return x, xu, xv, xuu, xuv, xvv


class InvertedGraphSampler:
    """Height sampling z = Z(x, y) of a representation by Newton inversion.

    Implements ``sample_grid``: each lattice point's zeta-guess is seeded from
    its left neighbor, then its lower neighbor, then the caller's seed
    (grid continuation); points where Newton diverges are marked invalid.
    """

    def __init__(self, data: WEData, zeta_seed: Optional[complex] = None):
        self.data = data
        self.zeta_seed = complex(zeta_seed if zeta_seed is not None else data.zeta0)

    def sample_grid(self, grid):
        nu, nv = grid.nu, grid.nv
        points = np.zeros((nu * nv, 3))
        valid = np.zeros(nu * nv, dtype=bool)
        zetas = [[None] * nv for _ in range(nu)]
        us = [float(t) for t in grid.u_values()]
        vs = [float(t) for t in grid.v_values()]
        for i in range(nu):
            for j in range(nv):
                guess = None
                if j > 0 and zetas[i][j - 1] is not None:
                    guess = zetas[i][j - 1]
                elif i > 0 and zetas[i - 1][j] is not None:
                    guess = zetas[i - 1][j]
                if guess is None:
                    guess = self.zeta_seed
                try:
                    zeta = invert_parametrization(self.data, us[i], vs[j], guess)
                    z = we_point(self.data, zeta)[2]
                except (NewtonDiverged, JacobianSingular, SingularPath, NoConvergence):
                    continue
                zetas[i][j] = zeta
                k = i * nv + j
                points[k] = (us[i], vs[j], z)
                valid[k] = True
        return points, valid


# ---------------------------------------------------------------------------
# timelike minimal surfaces (translation surface of null curves)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TLMSData:
    """Projected-Gauss-map data (q, r) and densities f(u), g(v)."""

    f_u: AnalyticExpr
    q_u: AnalyticExpr
    g_v: AnalyticExpr
    r_v: AnalyticExpr
    base: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.f_u.varname != self.q_u.varname:
            raise ValueError("f and q must share the u variable")
        if self.g_v.varname != self.r_v.varname:
            raise ValueError("g and r must share the v variable")

    @classmethod
    def from_text(cls, f_text: str, g_text: str, q_text: str, r_text: str,
                  base=(0.0, 0.0)) -> "TLMSData":
        return cls(parse(f_text, "u"), parse(q_text, "u"),
                   parse(g_text, "v"), parse(r_text, "v"),
                   tuple(float(t) for t in base))

    @cached_property
    def u_integrands(self):
        f, q = self.f_u.root, self.q_u.root
        q2 = Power(q, 2)
        shapes = (_mul(q, f),
                  _mul(Binary("sub", _ONE, q2), f),
                  _mul(Binary("add", _ONE, q2), f))
        return tuple(AnalyticExpr(s, self.f_u.varname) for s in shapes)

    @cached_property
    def v_integrands(self):
        g, r = self.g_v.root, self.r_v.root
        r2 = Power(r, 2)
        shapes = (_mul(r, g),
                  _mul(Binary("sub", _ONE, r2), g),
                  _mul(Binary("add", _ONE, r2), g))
        return tuple(AnalyticExpr(s, self.g_v.varname) for s in shapes)

    @cached_property
    def u_integrand_derivatives(self):
        return tuple(e.derivative() for e in self.u_integrands)

    @cached_property
    def v_integrand_derivatives(self):
        return tuple(e.derivative() for e in self.v_integrands)


def _assemble_tlms(qu, qv):
    x = -qu[0] + qv[0]
    y = -0.5 * (qu[1] + qv[1])
    z = 0.5 * (qu[2] - qv[2])
    return (x, y, z)


def tlms_point(data: TLMSData, u: float, v: float, tol: float = 1e-10):
    """Timelike-minimal surface point; the u-part and v-part are independent
    one-dimensional quadratures."""
    u0, v0 = data.base
    qu = [val.real for val in integrate_segment(data.u_integrands, u0, u, tol=tol)]
    qv = [val.real for val in integrate_segment(data.v_integrands, v0, v, tol=tol)]
    return _assemble_tlms(qu, qv)


class TLMSSampler:
    """Parametric (u, v) sampler with exact jets (X_uv = 0 by construction)."""

    def __init__(self, data: TLMSData, tol: float = 1e-10):
        self.data = data
        self.tol = tol

    def point(self, u: float, v: float):
        return tlms_point(self.data, u, v, tol=self.tol)

    def jet(self, u: float, v: float):
        x = self.point(u, v)
        ju = [e.eval(u).real for e in self.data.u_integrands]
        jv = [e.eval(v).real for e in self.data.v_integrands]
        dju = [e.eval(u).real for e in self.data.u_integrand_derivatives]
        djv = [e.eval(v).real for e in self.data.v_integrand_derivatives]
        xu = (-ju[0], -0.5 * ju[1], 0.5 * ju[2])
        xv = (jv[0], -0.5 * jv[1], -0.5 * jv[2])
        xuu = (-dju[0], -0.5 * dju[1], 0.5 * dju[2])
        xvv = (djv[0], -0.5 * djv[1], -0.5 * djv[2])
        xuv = (0.0, 0.0, 0.0)
        return x, xu, xv, xuu, xuv, xvv


# ---------------------------------------------------------------------------
# Born-Infeld solitons (two-function general solution)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BCData:
    """Two arbitrary smooth functions F(r), G(s); the base corner is (0, 0)."""

    F: AnalyticExpr
    G: AnalyticExpr

    @classmethod
    def from_text(cls, f_text: str, g_text: str) -> "BCData":
        return cls(parse(f_text, "r"), parse(g_text, "s"))

    @cached_property
    def f_prime(self):
        return self.F.derivative()

    @cached_property
    def g_prime(self):
        return self.G.derivative()

    @cached_property
    def r_integrands(self):
        rvar = Var(self.F.varname)
        fp = self.f_prime.root
        return (AnalyticExpr(_mul(Power(rvar, 2), fp), self.F.varname),
                AnalyticExpr(_mul(rvar, fp), self.F.varname))

    @cached_property
    def s_integrands(self):
        svar = Var(self.G.varname)
        gp = self.g_prime.root
        return (AnalyticExpr(_mul(Power(svar, 2), gp), self.G.varname),
                AnalyticExpr(_mul(svar, gp), self.G.varname))


def bc_point(data: BCData, r: float, s: float, tol: float = 1e-10):
    """Born-Infeld soliton point:
    x = (F + G - I_s[s^2 G'] - I_r[r^2 F'])/2,
    y = (G - F - I_r[r^2 F'] + I_s[s^2 G'])/2,
    z = I_r[r F'] + I_s[s G']."""
    qr = [val.real for val in integrate_segment(data.r_integrands, 0.0, r, tol=tol)]
    qs = [val.real for val in integrate_segment(data.s_integrands, 0.0, s, tol=tol)]
    f_r = data.F.eval(r).real
    g_s = data.G.eval(s).real
    x = 0.5 * (f_r + g_s - qs[0] - qr[0])
    y = 0.5 * (g_s - f_r - qr[0] + qs[0])
    z = qr[1] + qs[1]
    return (x, y, z)


class BCSampler:
    """Parametric (r, s) sampler with exact jets (X_rs = 0 by construction)."""

    def __init__(self, data: BCData, tol: float = 1e-10):
        self.data = data
        self.tol = tol

    def point(self, u: float, v: float):
        return bc_point(self.data, u, v, tol=self.tol)

    def jet(self, u: float, v: float):
        x = self.point(u, v)
        fp = self.data.f_prime.eval(u).real
        fpp = self.data.f_prime.derivative().eval(u).real
        gp = self.data.g_prime.eval(v).real
        gpp = self.data.g_prime.derivative().eval(v).real
        r, s = u, v
        xu = (0.5 * fp * (1 - r * r), -0.5 * fp * (1 + r * r), r * fp)
        xv = (0.5 * gp * (1 - s * s), 0.5 * gp * (1 + s * s), s * gp)
        xuu = (0.5 * (fpp * (1 - r * r) - 2 * r * fp),
               -0.5 * (fpp * (1 + r * r) + 2 * r * fp),
               fp + r * fpp)
        xvv = (0.5 * (gpp * (1 - s * s) - 2 * s * gp),
               0.5 * (gpp * (1 + s * s) + 2 * s * gp),
               gp + s * gpp)
        xuv = (0.0, 0.0, 0.0)
        return x, xu, xv, xuu, xuv, xvv

"""Catalog of classical ZMC height functions and their finite decomposition identities.

Surfaces live in a registry keyed by stable string ids (``scherk2``,
``scherk1[:alpha]``, ``helicoid``, ``scherk2max``, ``scherkBI``,
``plane[:a,b]``, ``expr:<text>``).  Identities are instantiated as explicit
term lists and verified pointwise under a branch policy, because arctan/log
identities are only true modulo their periods:

    principal       |L - S|
    mod-pi          distance of L - S to the nearest multiple of pi
    mod-2pi-i       distance of the complex L - S to the nearest multiple of 2*pi*i
    multiplicative  |exp(L) - exp(S)| / (1 + |exp(L)|)

Truncated Euler-Ramanujan series (arctan sums and the cosine product) are
provided as independent oracles for the closed forms.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

from . import expr as _expr
from .errors import DomainViolation, EmptyGrid
from .meshio import GridSpec
from .report import VerificationReport
from .zmc import GraphJet

__all__ = [
    "HeightSurface",
    "IdentityTerm",
    "IdentityInstance",
    "UnknownSurface",
    "UnknownIdentity",
    "ParamDomainError",
    "SingularArgument",
    "BUILTIN_SURFACES",
    "IDENTITY_IDS",
    "builtin_surface",
    "affine_rescaled",
    "c_offsets",
    "identity_terms",
    "rescaled_component",
    "branch_error",
    "verify_identity",
    "verify_identity_at",
    "er_series_partial",
    "kind_equation",
]

PI = math.pi


class UnknownSurface(KeyError):
    """Surface id not in the registry."""


class UnknownIdentity(KeyError):
    """Identity id not in the registry."""


class ParamDomainError(ValueError):
    """Identity parameters violate a precondition (zero scale, empty sum, ...)."""


class SingularArgument(ValueError):
    """Series argument sits on the singular set of the identity."""


# ---------------------------------------------------------------------------
# singularity distances (complex-capable)
# ---------------------------------------------------------------------------

def _dist_mod_pi(t: float, offset: float = 0.0) -> float:
    r = (t - offset) % PI
    return min(r, PI - r)


def _cos_zero_distance(arg) -> float:
    """Distance from ``arg`` to the zero set of cos (points pi/2 + k*pi on the real axis)."""
    a = complex(arg)
    return math.hypot(_dist_mod_pi(a.real, PI / 2), a.imag)


def _cosh_zero_distance(arg) -> float:
    """Distance from ``arg`` to the zero set of cosh (points i*(pi/2 + k*pi))."""
    a = complex(arg)
    return math.hypot(a.real, _dist_mod_pi(a.imag, PI / 2))


def _sin_zero_distance(arg) -> float:
    a = complex(arg)
    return math.hypot(_dist_mod_pi(a.real), a.imag)


# ---------------------------------------------------------------------------
# surfaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeightSurface:
    """A named graph surface z = Z(x, y).

    ``height`` is the complex-capable evaluator; ``domain`` the real-point
    validity predicate with a singularity margin; ``exact_jet`` the closed-form
    second-order jet (None when unavailable).  For kind != generic the
    corresponding graph PDE residual vanishes on the default grid (tested,
    not assumed).
    """

    id: str
    kind: str
    height: Callable
    domain: Callable
    exact_jet: Optional[Callable]
    default_grid: GridSpec

    def evaluate(self, x, y):
        value = self.height(complex(x), complex(y))
        if isinstance(x, complex) or isinstance(y, complex):
            return value
        if abs(value.imag) > 1e-9 * (1.0 + abs(value)):
            raise DomainViolation(f"{self.id} is not real-valued at ({x}, {y})", [(x, y)])
        return value.real

    def height_at(self, x: float, y: float) -> float:
        return self.evaluate(float(x), float(y))

    def domain_ok(self, x: float, y: float, margin: float = 0.0) -> bool:
        return bool(self.domain(x, y, margin))


def _real_jet_if_real(x, y, entries) -> GraphJet:
    if isinstance(x, complex) or isinstance(y, complex):
        return GraphJet(*entries)
    return GraphJet(*(v.real for v in entries))


def _scherk2_surface() -> HeightSurface:
    def height(x, y):
        cx = cmath.cos(x)
        cy = cmath.cos(y)
        if cx == 0 or cy == 0:
            raise DomainViolation("cosine vanishes", [(x, y)])
        return cmath.log(cy / cx)

    def domain(x, y, margin):
        if _cos_zero_distance(x) < margin or _cos_zero_distance(y) < margin:
            return False
        cx, cy = math.cos(x), math.cos(y)
        return cx != 0 and cy != 0 and cy / cx > 0

    def jet(x, y):
        tx = cmath.tan(complex(x))
        ty = cmath.tan(complex(y))
        z = height(complex(x), complex(y))
        return _real_jet_if_real(x, y, (z, tx, -ty, 1 + tx * tx, 0j, -(1 + ty * ty)))

    return HeightSurface("scherk2", "minimal", height, domain, jet,
                         GridSpec(-1.0, 1.0, -1.0, 1.0, 41, 41))


def _scherk2max_surface() -> HeightSurface:
    def height(x, y):
        return cmath.log(cmath.cosh(y) / cmath.cosh(x))

    def domain(x, y, margin):
        # cosh has no real zeros; all real points are valid.
        return True

    def jet(x, y):
        tx = cmath.tanh(complex(x))
        ty = cmath.tanh(complex(y))
        z = height(complex(x), complex(y))
        return _real_jet_if_real(x, y, (z, -tx, ty, -(1 - tx * tx), 0j, 1 - ty * ty))

    return HeightSurface("scherk2max", "maximal", height, domain, jet,
                         GridSpec(-1.0, 1.0, -1.0, 1.0, 41, 41))


def _scherk_bi_surface() -> HeightSurface:
    def height(x, y):
        cx = cmath.cos(x)
        if cx == 0:
            raise DomainViolation("cosine vanishes", [(x, y)])
        return cmath.log(cmath.cosh(y) / cx)

    def domain(x, y, margin):
        return _cos_zero_distance(x) >= margin and math.cos(x) > 0

    def jet(x, y):
        tx = cmath.tan(complex(x))
        ty = cmath.tanh(complex(y))
        z = height(complex(x), complex(y))
        return _real_jet_if_real(x, y, (z, tx, ty, 1 + tx * tx, 0j, 1 - ty * ty))

    return HeightSurface("scherkBI", "bi-soliton", height, domain, jet,
                         GridSpec(-1.0, 1.0, -1.0, 1.0, 41, 41))


def _helicoid_surface() -> HeightSurface:
    def height(x, y):
        if x == 0:
            raise DomainViolation("helicoid graph needs x != 0", [(x, y)])
        return cmath.atan(y / x)

    def domain(x, y, margin):
        return abs(x) > max(margin, 0.0) and (x, y) != (0.0, 0.0)

    def jet(x, y):
        xc, yc = complex(x), complex(y)
        r2 = xc * xc + yc * yc
        z = height(xc, yc)
        return _real_jet_if_real(x, y, (
            z,
            -yc / r2,
            xc / r2,
            2 * xc * yc / (r2 * r2),
            (yc * yc - xc * xc) / (r2 * r2),
            -2 * xc * yc / (r2 * r2),
        ))

    return HeightSurface("helicoid", "minimal", height, domain, jet,
                         GridSpec(0.3, 2.5, -2.0, 2.0, 41, 41))


def _scherk_first_height(x, y, alpha: float):
    """One-parameter Scherk-tower family: -sec(a/2)*atan(tanh(x*sin(a)/2)/tan(y*sin(a/2)))."""
    s1 = math.sin(alpha) / 2.0
    s2 = math.sin(alpha / 2.0)
    sec = 1.0 / math.cos(alpha / 2.0)
    t = cmath.tanh(s1 * complex(x))
    sb = cmath.sin(s2 * complex(y))
    if sb == 0:
        raise DomainViolation("tan vanishes in the tower denominator", [(x, y)])
    u = cmath.cos(s2 * complex(y)) / sb
    return -sec * cmath.atan(t * u)


def _scherk1_surface(alpha: float) -> HeightSurface:
    if math.cos(alpha / 2.0) == 0 or math.sin(alpha) == 0 or math.sin(alpha / 2.0) == 0:
        raise UnknownSurface(f"scherk1 is degenerate at alpha={alpha}")
    s1 = math.sin(alpha) / 2.0
    s2 = math.sin(alpha / 2.0)
    sec = 1.0 / math.cos(alpha / 2.0)

    def height(x, y):
        return _scherk_first_height(x, y, alpha)

    def domain(x, y, margin):
        # Grid-space distance to the tan-pole lines y = k*pi/s2.
        return _dist_mod_pi(s2 * y) / abs(s2) >= max(margin, 1e-12)

    def jet(x, y):
        xc, yc = complex(x), complex(y)
        t = cmath.tanh(s1 * xc)
        sb = cmath.sin(s2 * yc)
        if sb == 0:
            raise DomainViolation("tan vanishes in the tower denominator", [(x, y)])
        u = cmath.cos(s2 * yc) / sb
        d = 1 + t * t * u * u
        one_t = 1 - t * t
        one_u = 1 + u * u
        phi = cmath.atan(t * u)
        phi_x = s1 * u * one_t / d
        phi_y = -s2 * t * one_u / d
        phi_xx = -2 * s1 * s1 * t * u * one_t * one_u / (d * d)
        phi_yy = 2 * s2 * s2 * t * u * one_u * one_t / (d * d)
        phi_xy = -s1 * s2 * one_t * one_u * (1 - t * t * u * u) / (d * d)
        return _real_jet_if_real(x, y, tuple(-sec * v for v in
                                             (phi, phi_x, phi_y, phi_xx, phi_xy, phi_yy)))

    lo = 0.18 / s2
    hi = (PI - 0.18) / s2
    return HeightSurface(f"scherk1:{alpha!r}", "minimal", height, domain, jet,
                         GridSpec(-2.0, 2.0, min(lo, hi), max(lo, hi), 41, 41))


def _plane_surface(a: float, b: float) -> HeightSurface:
    def height(x, y):
        return a * complex(x) + b * complex(y)

    def jet(x, y):
        return _real_jet_if_real(x, y, (a * complex(x) + b * complex(y),
                                        complex(a), complex(b), 0j, 0j, 0j))

    return HeightSurface(f"plane:{a!r},{b!r}", "generic", height,
                         lambda x, y, margin: True, jet,
                         GridSpec(-1.0, 1.0, -1.0, 1.0, 41, 41))


def _expr_surface(text: str) -> HeightSurface:
    e = _expr.parse_xy(text, "x", "y")
    ex = e.partial("x")
    ey = e.partial("y")
    exx = ex.partial("x")
    exy = ex.partial("y")
    eyy = ey.partial("y")

    def height(x, y):
        return e.eval(x, y)

    def domain(x, y, margin):
        try:
            v = e.eval(x, y)
        except _expr.EvalDomainError:
            return False
        return abs(v.imag) <= 1e-9 * (1.0 + abs(v))

    def jet(x, y):
        vals = tuple(g.eval(x, y) for g in (e, ex, ey, exx, exy, eyy))
        return _real_jet_if_real(x, y, vals)

    return HeightSurface(f"expr:{text}", "generic", height, domain, jet,
                         GridSpec(-1.0, 1.0, -1.0, 1.0, 41, 41))


BUILTIN_SURFACES = ("scherk2", "scherk1", "helicoid", "scherk2max", "scherkBI", "plane")


def builtin_surface(surface_id: str) -> HeightSurface:
    """Look up (and parameterize) a surface by its registry id."""
    if surface_id.startswith("expr:"):
        return _expr_surface(surface_id[len("expr:"):])
    name, _, rest = surface_id.partition(":")
    try:
        if name == "scherk2":
            return _scherk2_surface()
        if name == "scherk2max":
            return _scherk2max_surface()
        if name == "scherkBI":
            return _scherk_bi_surface()
        if name == "helicoid":
            return _helicoid_surface()
        if name == "scherk1":
            alpha = float(rest) if rest else PI / 2
            return _scherk1_surface(alpha)
        if name == "plane":
            if rest:
                a_txt, b_txt = rest.split(",")
                return _plane_surface(float(a_txt), float(b_txt))
            return _plane_surface(0.0, 0.0)
    except (ValueError, TypeError) as exc:
        raise UnknownSurface(f"bad surface id {surface_id!r}: {exc}") from exc
    raise UnknownSurface(surface_id)


def affine_rescaled(surface: HeightSurface, a: float, b: float, d: float,
                    scale: float, new_id: Optional[str] = None) -> HeightSurface:
    """The surface z = scale * Z((x - b)/a, (y - d)/a); jets follow by the chain rule.

    The ZMC kind is preserved exactly when scale == a: the graph is then the
    homothety image (x, y, z) -> (a x + b, a y + d, a z) of the base surface.
    Other vertical scales shear the graph anisotropically and break the PDE.
    """
    if a == 0:
        raise ParamDomainError("affine scale a must be nonzero")

    def height(x, y):
        return scale * surface.height((x - b) / a, (y - d) / a)

    def domain(x, y, margin):
        return surface.domain_ok((x - b) / a, (y - d) / a, margin)

    inner_jet = surface.exact_jet

    def jet(x, y):
        j = inner_jet((x - b) / a, (y - d) / a)
        return GraphJet(scale * j.z, (scale / a) * j.z_x, (scale / a) * j.z_y,
                        (scale / a ** 2) * j.z_xx, (scale / a ** 2) * j.z_xy,
                        (scale / a ** 2) * j.z_yy)

    g = surface.default_grid
    lo_u, hi_u = sorted((a * g.u_min + b, a * g.u_max + b))
    lo_v, hi_v = sorted((a * g.v_min + d, a * g.v_max + d))
    return HeightSurface(
        new_id or f"{surface.id}~affine({a!r},{b!r},{d!r};{scale!r})",
        surface.kind, height, domain, jet if inner_jet is not None else None,
        GridSpec(lo_u, hi_u, lo_v, hi_v, g.nu, g.nv, g.margin),
    )


def kind_equation(kind: str) -> Optional[str]:
    """Graph PDE matching a surface kind (None for generic/timelike graphs)."""
    return {"minimal": "minimal", "maximal": "maximal", "bi-soliton": "bi-soliton"}.get(kind)


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def c_offsets(n: int) -> list:
    """The antisymmetric offset ladder c(m) = (2m - n + 1) * pi / (2n), m = 0..n-1."""
    return [(2 * m - n + 1) * PI / (2 * n) for m in range(n)]


@dataclass(frozen=True)
class IdentityTerm:
    """One evaluable term of an identity with its own singularity guard."""

    label: str
    fn: Callable
    guard: Callable  # (x, y, margin) -> bool


@dataclass(frozen=True)
class IdentityInstance:
    """A fully instantiated decomposition identity: LHS vs a finite term list."""

    id: str
    n: int
    params: dict
    lhs: IdentityTerm
    rhs_terms: tuple
    branch_policy: str


def _ratio_log(num, den, at):
    if den == 0 or num == 0:
        raise DomainViolation("log-ratio argument vanishes", [at])
    return cmath.log(num / den)


def _scherk2_decomp(n: int, params: dict) -> IdentityInstance:
    cs = c_offsets(n)

    lhs = IdentityTerm(
        "log(cos(y)/cos(x))",
        lambda x, y: _ratio_log(cmath.cos(y), cmath.cos(x), (x, y)),
        lambda x, y, m: _cos_zero_distance(x) >= m and _cos_zero_distance(y) >= m,
    )
    # Margins are measured in grid coordinates, so arguments scaled by 1/n get
    # their singularity distance rescaled by n.
    terms = []
    for m, c in enumerate(cs):
        terms.append(IdentityTerm(
            f"log(cos(y/{n} - c{m})/cos(x/{n} - c{m}))",
            lambda x, y, c=c: _ratio_log(cmath.cos(y / n - c), cmath.cos(x / n - c), (x, y)),
            lambda x, y, mg, c=c: (n * _cos_zero_distance(x / n - c) >= mg
                                   and n * _cos_zero_distance(y / n - c) >= mg),
        ))
    return IdentityInstance("scherk2-decomp", n, {"c": cs}, lhs, tuple(terms), "multiplicative")


def _kamien_decomp(n: int, params: dict) -> IdentityInstance:
    beta = float(params.get("beta", PI / 6))
    sin_b = math.sin(beta)
    if abs(sin_b) > n:
        raise ParamDomainError(f"|sin(beta)| = {abs(sin_b)} exceeds n = {n}")
    if abs(sin_b) < 1e-12 or abs(math.cos(beta)) < 1e-12:
        raise ParamDomainError("beta must avoid multiples of pi/2 for the tower family")
    beta_t = beta if n == 1 else math.asin(sin_b / n)
    sin_bt = math.sin(beta_t)
    prefactor = math.cos(beta_t) / math.cos(beta)
    sec_b = 1.0 / math.cos(beta)
    sec_bt = 1.0 / math.cos(beta_t)

    lhs = IdentityTerm(
        "h[x*sec(beta), y; 2*beta]",
        lambda x, y: _scherk_first_height(x * sec_b, y, 2 * beta),
        lambda x, y, m: _sin_zero_distance(sin_b * y) >= m * abs(sin_b),
    )
    terms = []
    shifts = [m * PI / (n * sin_bt) for m in range(n)]
    for m, shift in enumerate(shifts):
        terms.append(IdentityTerm(
            f"(cos(bt)/cos(b)) * h[x*sec(bt), y + {m}*pi*csc(bt)/{n}; 2*bt]",
            lambda x, y, s=shift: prefactor * _scherk_first_height(x * sec_bt, y + s, 2 * beta_t),
            lambda x, y, mg, s=shift: _sin_zero_distance(sin_bt * (y + s)) >= mg * abs(sin_bt),
        ))
    return IdentityInstance(
        "kamien-decomp", n,
        {"beta": beta, "beta_tilde": beta_t, "prefactor": prefactor, "shifts": shifts},
        lhs, tuple(terms), "mod-pi")


def _arctan_tanh_cot(a, b, at):
    sb = cmath.sin(b)
    if sb == 0:
        raise DomainViolation("cot argument is a multiple of pi", [at])
    return cmath.atan(cmath.tanh(a) * cmath.cos(b) / sb)


def _arctan_ratio(num, den, at):
    if den == 0:
        raise DomainViolation("flat arctan denominator vanishes", [at])
    return cmath.atan(num / den)


def _helicoid_decomp(n: int, params: dict) -> IdentityInstance:
    lhs = IdentityTerm(
        "atan(tanh(y)*cot(x))",
        lambda x, y: _arctan_tanh_cot(y, x, (x, y)),
        lambda x, y, m: _sin_zero_distance(x) >= m,
    )
    terms = []
    # Margins are grid-space distances: arguments scaled by 1/n rescale by n.
    # Group 1: tower terms at the shifted/scaled arguments.
    for m in range(1, n):
        terms.append(IdentityTerm(
            f"+atan(tanh(y/{n})*cot((x+{m}*pi)/{n}))",
            lambda x, y, m=m: _arctan_tanh_cot(y / n, (x + m * PI) / n, (x, y)),
            lambda x, y, mg, m=m: n * _sin_zero_distance((x + m * PI) / n) >= mg,
        ))
    # Group 2: subtracted flat arctans at the same scaled arguments.
    for m in range(1, n):
        terms.append(IdentityTerm(
            f"-atan((y/{n})/((x+{m}*pi)/{n}))",
            lambda x, y, m=m: -_arctan_ratio(y / n, (x + m * PI) / n, (x, y)),
            lambda x, y, mg, m=m: abs(complex(x + m * PI)) >= mg,
        ))
    # Group 3: the lone unshifted tower term.
    terms.append(IdentityTerm(
        f"+atan(tanh(y/{n})*cot(x/{n}))",
        lambda x, y: _arctan_tanh_cot(y / n, x / n, (x, y)),
        lambda x, y, mg: n * _sin_zero_distance(x / n) >= mg,
    ))
    # Group 4: subtracted flat arctans with the pi-shifted denominator.
    for m in range(1, n):
        terms.append(IdentityTerm(
            f"-atan((y/{n})/((x+{m}*pi)/{n} - pi))",
            lambda x, y, m=m: -_arctan_ratio(y / n, (x + m * PI) / n - PI, (x, y)),
            lambda x, y, mg, m=m: abs(complex(x + m * PI - n * PI)) >= mg,
        ))
    # Groups 5 and 6: the two helicoid fans.
    for m in range(1, n):
        terms.append(IdentityTerm(
            f"+atan(y/(x+{m}*pi))",
            lambda x, y, m=m: _arctan_ratio(y, x + m * PI, (x, y)),
            lambda x, y, mg, m=m: abs(complex(x + m * PI)) >= mg,
        ))
    for m in range(1, n):
        terms.append(IdentityTerm(
            f"+atan(y/(x-{m}*pi))",
            lambda x, y, m=m: _arctan_ratio(y, x - m * PI, (x, y)),
            lambda x, y, mg, m=m: abs(complex(x - m * PI)) >= mg,
        ))
    return IdentityInstance("helicoid-decomp", n, {}, lhs, tuple(terms), "mod-pi")


def _scherk2max_decomp(n: int, params: dict) -> IdentityInstance:
    cs = c_offsets(n)
    lhs = IdentityTerm(
        "log(cosh(y)/cosh(x))",
        lambda x, y: _ratio_log(cmath.cosh(y), cmath.cosh(x), (x, y)),
        lambda x, y, m: _cosh_zero_distance(x) >= m and _cosh_zero_distance(y) >= m,
    )
    terms = []
    for m, c in enumerate(cs):
        terms.append(IdentityTerm(
            f"log(cosh(y/{n} + i*c{m})/cosh(x/{n} + i*c{m}))",
            lambda x, y, c=c: _ratio_log(cmath.cosh(y / n + 1j * c),
                                         cmath.cosh(x / n + 1j * c), (x, y)),
            lambda x, y, mg, c=c: (n * _cosh_zero_distance(complex(x) / n + 1j * c) >= mg
                                   and n * _cosh_zero_distance(complex(y) / n + 1j * c) >= mg),
        ))
    return IdentityInstance("scherk2max-decomp", n, {"c": cs}, lhs, tuple(terms), "mod-2pi-i")


def _scherk_bi_decomp(n: int, params: dict) -> IdentityInstance:
    cs = c_offsets(n)
    lhs = IdentityTerm(
        "log(cosh(y)/cos(x))",
        lambda x, y: _ratio_log(cmath.cosh(y), cmath.cos(x), (x, y)),
        lambda x, y, m: _cosh_zero_distance(y) >= m and _cos_zero_distance(x) >= m,
    )
    terms = []
    for m, c in enumerate(cs):
        terms.append(IdentityTerm(
            f"log(cosh(y/{n} + i*c{m})/cos(x/{n} - c{m}))",
            lambda x, y, c=c: _ratio_log(cmath.cosh(y / n + 1j * c),
                                         cmath.cos(x / n - c), (x, y)),
            lambda x, y, mg, c=c: (n * _cosh_zero_distance(complex(y) / n + 1j * c) >= mg
                                   and n * _cos_zero_distance(complex(x) / n - c) >= mg),
        ))
    return IdentityInstance("scherkBI-decomp", n, {"c": cs}, lhs, tuple(terms), "mod-2pi-i")


def _general_scaled(n: int, params: dict) -> IdentityInstance:
    surface_id = str(params.get("surface", "scherk2"))
    base = builtin_surface(surface_id)
    a = [float(v) for v in params.get("a", [1.0] * n)]
    b = [float(v) for v in params.get("b", [0.0] * n)]
    d = [float(v) for v in params.get("d", [0.0] * n)]
    c = [float(v) for v in params.get("c", [float(m) for m in range(1, n + 1)])]
    for name, values in (("a", a), ("b", b), ("d", d), ("c", c)):
        if len(values) != n:
            raise ParamDomainError(f"parameter {name!r} must have length n = {n}")
    if any(v == 0 for v in a):
        raise ParamDomainError("all scale factors a_m must be nonzero")
    if any(v == 0 for v in c):
        raise ParamDomainError("all weights c_m must be nonzero")
    c_total = sum(1.0 / v for v in c)
    if abs(c_total) < 1e-15:
        raise ParamDomainError("the weight sum C_n must be nonzero")

    lhs = IdentityTerm(
        f"{surface_id}(x, y)",
        lambda x, y: base.height(x, y),
        lambda x, y, m: (True if isinstance(x, complex) or isinstance(y, complex)
                         else base.domain_ok(x, y, m)),
    )
    terms = []
    for m in range(n):
        am, bm, dm, cm = a[m], b[m], d[m], c[m]

        def term_fn(x, y, am=am, bm=bm, dm=dm, cm=cm):
            # Evaluated through the literal affine chain so the algebraic
            # cancellation is exercised, not assumed.
            xx = am * x + bm
            yy = am * y + dm
            return base.height((xx - bm) / am, (yy - dm) / am) / (cm * c_total)

        terms.append(IdentityTerm(
            f"(1/(C_n*c_{m})) * {surface_id}(((a_{m}x+b_{m})-b_{m})/a_{m}, ...)",
            term_fn, lhs.guard))
    return IdentityInstance(
        "general-scaled", n,
        {"surface": surface_id, "a": a, "b": b, "d": d, "c": c, "C_n": c_total},
        lhs, tuple(terms), "principal")


def rescaled_component(inst: IdentityInstance, m: int) -> HeightSurface:
    """The m-th component rescaled back to a surface of the base kind:
    alpha_m * Z_m with alpha_m = a_m * c_m, i.e. a_m * Z((x-b_m)/a_m, (y-d_m)/a_m).

    This is the homothety image of the base surface (scale a_m plus the
    translation), which satisfies the same graph PDE.  Rescaling by c_m/a_m
    instead would scale the height by 1/a_m against a plane scale of a_m, a
    vertical squeeze that is not ZMC for a_m != +-1.
    """
    if inst.id != "general-scaled":
        raise UnknownIdentity("rescaled components exist only for general-scaled")
    base = builtin_surface(inst.params["surface"])
    a = inst.params["a"][m]
    return affine_rescaled(base, a, inst.params["b"][m], inst.params["d"][m], a)


_IDENTITY_BUILDERS = {
    "scherk2-decomp": _scherk2_decomp,
    "kamien-decomp": _kamien_decomp,
    "helicoid-decomp": _helicoid_decomp,
    "scherk2max-decomp": _scherk2max_decomp,
    "scherkBI-decomp": _scherk_bi_decomp,
    "general-scaled": _general_scaled,
}

IDENTITY_IDS = tuple(sorted(_IDENTITY_BUILDERS))


def identity_terms(identity_id: str, n: int, params: Optional[dict] = None) -> IdentityInstance:
    """Instantiate an identity from the registry with its default branch policy."""
    if identity_id not in _IDENTITY_BUILDERS:
        raise UnknownIdentity(identity_id)
    if not isinstance(n, int) or n < 1:
        raise ParamDomainError(f"n must be a positive integer, got {n!r}")
    return _IDENTITY_BUILDERS[identity_id](n, dict(params or {}))


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

BRANCH_POLICIES = ("principal", "mod-pi", "mod-2pi-i", "multiplicative")

_TWO_PI = 2 * PI


def branch_error(policy: str, lhs, rhs_sum) -> float:
    """Distance between the two sides under the branch policy."""
    d = complex(lhs) - complex(rhs_sum)
    if policy == "principal":
        return abs(d)
    if policy == "mod-pi":
        k = round(d.real / PI)
        return abs(d - k * PI)
    if policy == "mod-2pi-i":
        k = round(d.imag / _TWO_PI)
        return abs(d - k * _TWO_PI * 1j)
    if policy == "multiplicative":
        el = cmath.exp(complex(lhs))
        es = cmath.exp(complex(rhs_sum))
        return abs(el - es) / (1.0 + abs(el))
    raise ValueError(f"unknown branch policy {policy!r}")


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("ZMC_THREADS", "1")))
    except ValueError:
        return 1


def _check_guards(inst: IdentityInstance, points, margin: float) -> None:
    bad = []
    for x, y in points:
        if not inst.lhs.guard(x, y, margin) or any(
                not t.guard(x, y, margin) for t in inst.rhs_terms):
            bad.append((x, y))
    if bad:
        raise DomainViolation(
            f"{len(bad)} probe points violate the {inst.id} singularity margin {margin}",
            bad[:10])


def _evaluate_points(inst: IdentityInstance, points, policy: str):
    rows = []
    for x, y in points:
        lhs = inst.lhs.fn(x, y)
        rhs = sum(t.fn(x, y) for t in inst.rhs_terms)
        rows.append((branch_error(policy, lhs, rhs), x, y, lhs, rhs))
    return rows


def _reduce_rows(inst, rows, policy, tolerance, grid, n_points, extra_params=None):
    if not rows:
        raise EmptyGrid("identity verification saw no points")
    max_err = -1.0
    worst = None
    total = 0.0
    for err, x, y, lhs, rhs in rows:
        total += err
        if err > max_err:
            max_err = err
            worst = {"coords": [x, y], "lhs": lhs, "rhs": rhs}
    params = {"n": inst.n, **inst.params}
    if extra_params:
        params.update(extra_params)
    return VerificationReport(
        subject=f"identity:{inst.id}",
        parameters=params,
        grid=grid,
        points_checked=n_points,
        max_abs_err=max_err,
        mean_abs_err=total / n_points,
        worst_point=worst,
        policy=policy,
        tolerance=tolerance,
    )


def verify_identity(inst: IdentityInstance, grid: GridSpec, tolerance: float = 1e-9,
                    policy: Optional[str] = None) -> VerificationReport:
    """Sweep the identity over a real lattice under the branch policy.

    Every lattice point must clear every term's singularity margin
    (DomainViolation otherwise).  Rows may be evaluated in parallel
    (ZMC_THREADS); the reduction is row-ordered, so results are deterministic.
    """
    policy = policy or inst.branch_policy
    if policy not in BRANCH_POLICIES:
        raise ValueError(f"unknown branch policy {policy!r}")
    us = [float(u) for u in grid.u_values()]
    vs = [float(v) for v in grid.v_values()]
    points = [(u, v) for u in us for v in vs]
    _check_guards(inst, points, grid.margin)

    def run_row(u):
        return _evaluate_points(inst, [(u, v) for v in vs], policy)

    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            row_results = list(pool.map(run_row, us))
    else:
        row_results = [run_row(u) for u in us]
    rows = [item for row in row_results for item in row]
    return _reduce_rows(inst, rows, policy, tolerance, grid, len(points))


def verify_identity_at(inst: IdentityInstance, points, tolerance: float = 1e-9,
                       policy: Optional[str] = None, margin: float = 0.05) -> VerificationReport:
    """Verify at explicit probe points (real or complex pairs)."""
    policy = policy or inst.branch_policy
    if policy not in BRANCH_POLICIES:
        raise ValueError(f"unknown branch policy {policy!r}")
    points = list(points)
    if not points:
        raise EmptyGrid("no probe points supplied")
    _check_guards(inst, points, margin)
    rows = _evaluate_points(inst, points, policy)
    return _reduce_rows(inst, rows, policy, tolerance, None, len(points),
                        extra_params={"probes": len(points), "margin": margin})


# ---------------------------------------------------------------------------
# Euler-Ramanujan partial sums (independent oracles)
# ---------------------------------------------------------------------------

ER_KINDS = ("arctan-sum", "cos-product", "arctan-bilateral")


def er_series_partial(kind: str, a: float, b: float, terms: int) -> float:
    """Truncated series oracle.

    * ``arctan-sum``:        atan(a/b) + sum_{k=1..K} [atan(a/(b+k*pi)) + atan(a/(b-k*pi))]
    * ``arctan-bilateral``:  sum_{k=-K..K} atan(a/(b+k*pi))
    * ``cos-product``:       log of the K-term product for cos(a)/cos(b) with
                             X = a - b, A = b:
                             sum_{k=1..K} log((1 - X/((k-1/2)pi - A)) * (1 + X/((k-1/2)pi + A)))

    Both arctan forms converge to atan(tanh(a)*cot(b)) with an O(a*b/K) tail.
    """
    if terms < 1:
        raise ValueError("need at least one term")
    if kind in ("arctan-sum", "arctan-bilateral"):
        if _dist_mod_pi(b) < 1e-12:
            raise SingularArgument(f"b = {b} is a multiple of pi")
        if kind == "arctan-sum":
            total = math.atan(a / b)
            for k in range(1, terms + 1):
                total += math.atan(a / (b + k * PI)) + math.atan(a / (b - k * PI))
            return total
        total = 0.0
        for k in range(-terms, terms + 1):
            total += math.atan(a / (b + k * PI))
        return total
    if kind == "cos-product":
        big_a = b
        x = a - b
        if _dist_mod_pi(big_a, PI / 2) < 1e-12:
            raise SingularArgument(f"A = {big_a} is an odd multiple of pi/2")
        total = 0.0
        for k in range(1, terms + 1):
            node = (k - 0.5) * PI
            factor = (1.0 - x / (node - big_a)) * (1.0 + x / (node + big_a))
            if factor <= 0:
                raise SingularArgument(
                    f"product factor nonpositive at k={k} (arguments too large)")
            total += math.log(factor)
        return total
    raise ValueError(f"unknown series kind {kind!r}; expected one of {ER_KINDS}")

"""Fourier contour model, global placement and per-point reflection geometry.

The target perimeter is the truncated Fourier curve
rho(u) = (sum_q a_q cos(qu), sum_q b_q sin(qu)), u in [0, 2pi), placed in the
global frame as r(u) = p + R(heading) rho(u) with p the target center seen
from the radar at the origin. All reflection geometry (d, phi, beta, psi) and
the roughness-weighted illumination profiles (w, v) derive from r and rdot.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import QuadratureError, RegularityError, ScenarioError

TWO_PI = 2.0 * np.pi

# rotate a 2-vector by +90 degrees: x_perp = PERP @ x
PERP = np.array([[0.0, -1.0], [1.0, 0.0]])


def wrap_angle(x):
    """Wrap angle(s) to (-pi, pi]."""
    w = np.mod(np.asarray(x, dtype=float), TWO_PI)
    w = np.where(w > np.pi, w - TWO_PI, w)
    return w if w.ndim else float(w)


def rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class ContourParams:
    """Truncated Fourier coefficients of the target contour (meters).

    m holds the Q cosine coefficients a_q, n the Q sine coefficients b_q.
    a_1 > 0 and b_1 > 0 so the curve cycles anti-clockwise.
    """

    m: np.ndarray
    n: np.ndarray

    def __post_init__(self):
        m = np.atleast_1d(np.asarray(self.m, dtype=float))
        n = np.atleast_1d(np.asarray(self.n, dtype=float))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)
        if m.ndim != 1 or m.shape != n.shape or m.size < 1:
            raise ScenarioError("contour needs equally sized 1-D coefficient vectors, Q >= 1")
        if not (m[0] > 0.0 and n[0] > 0.0):
            raise ScenarioError("contour must cycle anti-clockwise: a_1 > 0 and b_1 > 0")

    @property
    def q(self) -> int:
        return self.m.size


@dataclass(frozen=True)
class TargetPose:
    """Target center in radar-local polar coordinates plus heading (radians)."""

    d: float
    phi: float
    heading: float

    def __post_init__(self):
        if not self.d > 0.0:
            raise ScenarioError(f"target range must be positive, got {self.d}")
        object.__setattr__(self, "phi", wrap_angle(self.phi))
        object.__setattr__(self, "heading", wrap_angle(self.heading))

    @property
    def p(self) -> np.ndarray:
        """Center position p = d [cos(phi), sin(phi)]."""
        return self.d * np.array([np.cos(self.phi), np.sin(self.phi)])


@dataclass(frozen=True)
class QuadratureSpec:
    """Contour quadrature: uniform periodic-trapezoid grid, optionally split
    at the shadow boundaries (zeros of sin(phi - beta)) for kink-aware panels."""

    nodes: int = 4096
    split_at_shadow: bool = False

    def __post_init__(self):
        if self.nodes < 16:
            raise ScenarioError("quadrature needs at least 16 nodes")


@dataclass(frozen=True)
class GeometryPoint:
    """Geometry of one contour point in the global (radar-centered) frame."""

    u: float
    r: np.ndarray
    r_dot: np.ndarray
    d: float
    phi: float
    beta: float
    psi: float
    arc_weight: float


@dataclass(frozen=True)
class GeometryTable:
    """Vectorized geometry over a quadrature grid; the source of all fields."""

    u: np.ndarray          # (K,) nodes
    du: np.ndarray         # quadrature weights in u, scalar array or (K,)
    rho: np.ndarray        # (2, K) local contour
    rho_dot: np.ndarray    # (2, K)
    r: np.ndarray          # (2, K) global positions
    r_dot: np.ndarray      # (2, K)
    d: np.ndarray          # (K,)
    phi: np.ndarray        # (K,)
    beta: np.ndarray       # (K,)
    psi: np.ndarray        # (K,)
    arc: np.ndarray        # (K,) ||r_dot||


@dataclass(frozen=True)
class ReflectionWeights:
    """Roughness-shaped illumination profiles along the contour.

    w = (sin+(phi-beta))^(alpha+1) and v = (sin+(phi-beta))^alpha cos(phi-beta),
    with sin+ x = max(sin x, 0); both vanish on the shadowed side.
    """

    w: np.ndarray
    v: np.ndarray


def fourier_basis(q: int, u):
    """cos(ku), sin(ku) and their u-derivatives for k = 1..q, shape (q, ...)."""
    u = np.asarray(u, dtype=float)
    k = np.arange(1, q + 1).reshape((q,) + (1,) * u.ndim)
    ku = k * u
    sigma, varsigma = np.cos(ku), np.sin(ku)
    return sigma, varsigma, -k * varsigma, k * sigma


def eval_local(params: ContourParams, u):
    """Local contour point rho(u) and tangent rho_dot(u), shapes (2,) + u.shape."""
    sigma, varsigma, sigma_dot, varsigma_dot = fourier_basis(params.q, u)
    rho = np.stack([np.tensordot(params.m, sigma, axes=1),
                    np.tensordot(params.n, varsigma, axes=1)])
    rho_dot = np.stack([np.tensordot(params.m, sigma_dot, axes=1),
                        np.tensordot(params.n, varsigma_dot, axes=1)])
    return rho, rho_dot


def eval_global(params: ContourParams, pose: TargetPose, u) -> GeometryPoint:
    """Geometry of the contour point at parameter u in the global frame."""
    g = geometry_at(params, pose, np.atleast_1d(np.asarray(u, dtype=float)))
    if g.arc.min() <= 0.0:
        raise RegularityError(f"degenerate tangent at u={u}")
    i = 0
    return GeometryPoint(
        u=float(np.atleast_1d(u)[i]), r=g.r[:, i].copy(), r_dot=g.r_dot[:, i].copy(),
        d=float(g.d[i]), phi=float(g.phi[i]), beta=float(g.beta[i]),
        psi=float(g.psi[i]), arc_weight=float(g.arc[i]),
    )


def geometry_at(params: ContourParams, pose: TargetPose, u: np.ndarray,
                 du=None) -> GeometryTable:
    rho, rho_dot = eval_local(params, u)
    rot = rotation(pose.heading)
    r = pose.p[:, None] + rot @ rho
    r_dot = rot @ rho_dot
    d = np.hypot(r[0], r[1])
    phi = np.arctan2(r[1], r[0])
    beta = np.arctan2(r_dot[1], r_dot[0])
    psi = np.mod(3.0 * np.pi / 2.0 + phi - beta, TWO_PI)
    arc = np.hypot(r_dot[0], r_dot[1])
    if du is None:
        du = np.array(0.0)
    return GeometryTable(u=u, du=np.asarray(du, dtype=float), rho=rho, rho_dot=rho_dot,
                         r=r, r_dot=r_dot, d=d, phi=phi, beta=beta, psi=psi, arc=arc)


def reflection_weights(geometry, alpha: float) -> ReflectionWeights:
    """Illumination weights for a GeometryPoint or GeometryTable."""
    if alpha < 0.0:
        raise ScenarioError(f"surface roughness must be >= 0, got {alpha}")
    theta = np.asarray(geometry.phi) - np.asarray(geometry.beta)
    sp = np.maximum(np.sin(theta), 0.0)
    lit = sp > 0.0
    w = np.where(lit, sp ** (alpha + 1.0), 0.0)
    # 0**0 would give v = cos on the shadowed side; force the shadow to 0
    v = np.where(lit, sp**alpha * np.cos(theta), 0.0)
    return ReflectionWeights(w=w, v=v)


def uniform_grid(nodes: int):
    """Uniform periodic grid with equal weights (trapezoid on a periodic function)."""
    u = np.arange(nodes) * (TWO_PI / nodes)
    return u, np.full(nodes, TWO_PI / nodes)


def geometry_table(params: ContourParams, pose: TargetPose,
                   spec: QuadratureSpec = QuadratureSpec()) -> GeometryTable:
    """Evaluate the full contour geometry on the configured quadrature grid.

    With split_at_shadow the grid is rebuilt from composite trapezoid panels
    whose endpoints sit on the zeros of sin(phi - beta), restoring high-order
    convergence for integrands with rectifier kinks.
    """
    u, du = uniform_grid(spec.nodes)
    table = geometry_at(params, pose, u, du)
    if table.arc.min() <= 0.0:
        raise RegularityError("contour is not regular: ||rho_dot|| vanishes on the grid")
    if not spec.split_at_shadow:
        return table
    kinks = _shadow_boundaries(params, pose, table)
    if not kinks:
        return table
    u, du = _panel_grid(kinks, spec.nodes)
    return geometry_at(params, pose, u, du)


def _shadow_boundaries(params, pose, coarse: GeometryTable):
    """Zeros of sin(phi - beta) in [0, 2pi), located by bracketing + brentq."""

    def f(u):
        g = geometry_at(params, pose, np.atleast_1d(float(u)))
        return float(np.sin(g.phi[0] - g.beta[0]))

    vals = np.sin(coarse.phi - coarse.beta)
    u = coarse.u
    zeros = []
    for i in range(len(u)):
        j = (i + 1) % len(u)
        a, b = u[i], u[i] + (TWO_PI / len(u))
        if vals[i] == 0.0:
            zeros.append(a)
        elif vals[i] * vals[j] < 0.0:
            zeros.append(brentq(f, a, b, xtol=1e-13))
    return sorted(z % TWO_PI for z in zeros)


def _panel_grid(kinks, total_nodes):
    """Composite open-trapezoid panels between consecutive kinks over one period."""
    edges = list(kinks) + [kinks[0] + TWO_PI]
    us, dus = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        length = b - a
        n = max(8, int(round(total_nodes * length / TWO_PI)))
        # closed trapezoid over [a, b]; endpoints carry half weights so the
        # kink itself is a node of both adjacent panels
        h = length / n
        pts = a + h * np.arange(n + 1)
        wts = np.full(n + 1, h)
        wts[0] = wts[-1] = h / 2.0
        us.append(pts)
        dus.append(wts)
    u = np.concatenate(us) % TWO_PI
    du = np.concatenate(dus)
    order = np.argsort(u, kind="stable")
    return u[order], du[order]


def perimeter(params: ContourParams, spec: QuadratureSpec = QuadratureSpec(),
              rel_tol: float = 1e-7) -> float:
    """Total contour length, with a refinement check on convergence."""
    total = None
    for nodes in (spec.nodes, 2 * spec.nodes):
        u, du = uniform_grid(nodes)
        _, rho_dot = eval_local(params, u)
        speed = np.hypot(rho_dot[0], rho_dot[1])
        if speed.min() <= 0.0:
            raise RegularityError("contour is not regular: ||rho_dot|| vanishes on the grid")
        prev, total = total, float(np.sum(speed * du))
    if abs(total - prev) > rel_tol * abs(total):
        raise QuadratureError(
            f"perimeter quadrature not converged: {prev} vs {total} at {spec.nodes} nodes"
        )
    return total


def arclength_params(params: ContourParams, fractions, nodes: int = 8192) -> np.ndarray:
    """Contour parameters u at the given arc-length fractions of the perimeter."""
    u = np.linspace(0.0, TWO_PI, nodes + 1)
    _, rho_dot = eval_local(params, u)
    speed = np.hypot(rho_dot[0], rho_dot[1])
    # cumulative trapezoid arc length along u
    s = np.concatenate([[0.0], np.cumsum((speed[1:] + speed[:-1]) / 2.0 * np.diff(u))])
    return np.interp(np.asarray(fractions, dtype=float) * s[-1], s, u)


def check_simple(params: ContourParams, nodes: int = 256) -> bool:
    """Advisory self-intersection test on a polygonal sampling; warns if it fails."""
    u, _ = uniform_grid(nodes)
    rho, _ = eval_local(params, u)
    pts = rho.T
    a = pts
    b = np.roll(pts, -1, axis=0)
    for i in range(nodes):
        # skip the segment itself and its two neighbours
        js = np.arange(i + 2, nodes if i > 0 else nodes - 1)
        if js.size == 0:
            continue
        if np.any(_segments_cross(a[i], b[i], a[js], b[js])):
            warnings.warn("contour appears to self-intersect (advisory check)", stacklevel=2)
            return False
    return True


def _segments_cross(p0, p1, q0, q1):
    def orient(o, a, b):
        return (a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1]) - (
            a[..., 1] - o[..., 1]
        ) * (b[..., 0] - o[..., 0])

    d1 = orient(p0, p1, q0) * orient(p0, p1, q1)
    d2 = orient(q0, q1, p0[None]) * orient(q0, q1, p1[None])
    return (d1 < 0) & (d2 < 0)

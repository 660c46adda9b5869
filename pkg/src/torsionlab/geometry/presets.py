"""Closed 4-manifold presets: charts, metrics, quadrature.

Every preset is a single chart with a closed-form metric, periodicity flags
and a per-axis quadrature rule: trapezoid on periodic directions (spectrally
accurate for the analytic periodic integrands that arise here) and
Gauss-Legendre on open polar directions, whose nodes are interior and so
never touch coordinate singularities.

Warp and amplitude profiles on the circle are truncated Fourier series, which
keeps every preset exactly differentiable to arbitrary order under forward-
mode AD.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.special import roots_legendre

import jax

jax.config.update("jax_enable_x64", True)

import jax.numpy as jnp

__all__ = [
    "FourierSeries",
    "GeometryPreset",
    "flat_torus4",
    "round_sphere4",
    "product_s2s2",
    "warped_s1xs3",
    "warped_s1xt3",
    "make_preset",
    "PRESET_NAMES",
    "NumericalDomainError",
]

PRESET_NAMES = ("flat_torus4", "round_sphere4", "product_s2s2", "warped_s1xs3", "warped_s1xt3")

TRAPEZOID = "trapezoid"
GAUSS = "gauss"


class NumericalDomainError(ArithmeticError):
    """A numeric evaluation left its admissible domain (non-SPD metric, NaN node)."""


class FourierSeries:
    """Real truncated Fourier series on the unit circle t in [0, 1)."""

    def __init__(self, const: float, cos_coeffs: Sequence[float] = (), sin_coeffs: Sequence[float] = ()):
        self.const = float(const)
        self.cos_coeffs = tuple(float(c) for c in cos_coeffs)
        self.sin_coeffs = tuple(float(c) for c in sin_coeffs)

    def __call__(self, t):
        out = self.const
        for m, c in enumerate(self.cos_coeffs, start=1):
            out = out + c * jnp.cos(2 * jnp.pi * m * t)
        for m, c in enumerate(self.sin_coeffs, start=1):
            out = out + c * jnp.sin(2 * jnp.pi * m * t)
        return out

    def min_on_grid(self, n: int = 4096) -> float:
        t = np.linspace(0.0, 1.0, n, endpoint=False)
        return float(np.min(np.asarray(jax.vmap(self)(jnp.asarray(t)))))

    def params(self) -> dict:
        return {"const": self.const, "cos": list(self.cos_coeffs), "sin": list(self.sin_coeffs)}


class GeometryPreset:
    """A chart with closed-form metric and a quadrature rule.

    Parameters
    ----------
    name:
        One of the registered preset names.
    metric:
        JAX-traceable map from chart coordinates (4,) to the metric (4,4).
    box:
        Coordinate ranges per axis.
    periodic:
        Periodicity flag per axis; periodic axes use trapezoid quadrature,
        the rest Gauss-Legendre.
    nodes:
        Default node count per axis.
    params:
        The constructor parameters, kept for reporting.
    """

    def __init__(self, name, metric, box, periodic, nodes, params=None, interior_margin=0.05):
        self.name = name
        self.metric = metric
        self.box = tuple((float(lo), float(hi)) for lo, hi in box)
        self.periodic = tuple(bool(p) for p in periodic)
        self.default_nodes = tuple(int(n) for n in nodes)
        self.params = dict(params or {})
        self.interior_margin = float(interior_margin)
        self._cache: dict = {}
        self._validate_construction()

    @property
    def dim(self) -> int:
        return 4

    def rules(self):
        return tuple(TRAPEZOID if p else GAUSS for p in self.periodic)

    # ---------------------------------------------------------------- points
    def sample_points(self, count: int, seed: int) -> np.ndarray:
        """Deterministic chart-interior sample, away from open-axis endpoints."""
        rng = np.random.default_rng(seed)
        u = rng.random((count, 4))
        pts = np.empty((count, 4))
        for ax, ((lo, hi), per) in enumerate(zip(self.box, self.periodic)):
            if per:
                pts[:, ax] = lo + (hi - lo) * u[:, ax]
            else:
                m = self.interior_margin
                pts[:, ax] = lo + (hi - lo) * (m + (1 - 2 * m) * u[:, ax])
        return pts

    # ------------------------------------------------------------ quadrature
    def quadrature(self, nodes=None):
        """Nodes (N,4) and coordinate weights (N,) -- sqrt(det g) not included."""
        counts = tuple(int(n) for n in (nodes or self.default_nodes))
        key = ("quad", counts)
        if key not in self._cache:
            axes_x, axes_w = [], []
            for (lo, hi), per, n in zip(self.box, self.periodic, counts):
                if per:
                    x = lo + (hi - lo) * np.arange(n) / n
                    w = np.full(n, (hi - lo) / n)
                else:
                    xg, wg = roots_legendre(n)
                    x = 0.5 * (hi + lo) + 0.5 * (hi - lo) * xg
                    w = 0.5 * (hi - lo) * wg
                axes_x.append(x)
                axes_w.append(w)
            grids = np.meshgrid(*axes_x, indexing="ij")
            pts = np.stack([g.ravel() for g in grids], axis=1)
            wgrids = np.meshgrid(*axes_w, indexing="ij")
            wprod = np.prod(np.stack([g.ravel() for g in wgrids], axis=0), axis=0)
            self._cache[key] = (pts, wprod)
        return self._cache[key]

    def sqrt_det(self, pts: np.ndarray) -> np.ndarray:
        fn = self._cache.get("sqrt_det_fn")
        if fn is None:
            fn = jax.jit(jax.vmap(lambda x: jnp.sqrt(jnp.linalg.det(self.metric(x)))))
            self._cache["sqrt_det_fn"] = fn
        out = np.asarray(fn(jnp.asarray(pts)))
        if not np.all(np.isfinite(out)) or np.any(out <= 0):
            raise NumericalDomainError(f"metric degenerate on quadrature nodes of {self.name}")
        return out

    def volume(self, nodes=None) -> float:
        pts, w = self.quadrature(nodes)
        return float(np.sum(w * self.sqrt_det(pts)))

    # ------------------------------------------------------------ validation
    def _validate_construction(self):
        pts, w = self.quadrature()
        if np.any(w <= 0):
            raise ValueError("quadrature weights must be positive")
        g = np.asarray(jax.vmap(self.metric)(jnp.asarray(pts[:: max(1, len(pts) // 512)])))
        eigs = np.linalg.eigvalsh(0.5 * (g + np.swapaxes(g, 1, 2)))
        if not np.all(np.isfinite(eigs)) or np.min(eigs) <= 0:
            raise NumericalDomainError(f"metric not positive definite on {self.name} nodes")


# ------------------------------------------------------------------ factories

def flat_torus4(nodes=(12, 12, 12, 12)) -> GeometryPreset:
    """Unit flat torus; everything periodic, curvature identically zero."""

    def metric(x):
        return jnp.eye(4)

    return GeometryPreset(
        "flat_torus4", metric, box=[(0, 1)] * 4, periodic=[True] * 4, nodes=nodes, params={}
    )


def round_sphere4(radius: float = 1.0, nodes=(20, 20, 18, 12)) -> GeometryPreset:
    """Round 4-sphere in nested polar coordinates (three polar, one azimuthal)."""
    r = float(radius)
    if r <= 0:
        raise ValueError("radius must be positive")

    def metric(x):
        t1, t2, t3 = x[0], x[1], x[2]
        s1, s2, s3 = jnp.sin(t1), jnp.sin(t2), jnp.sin(t3)
        return r**2 * jnp.diag(
            jnp.array([1.0, s1**2, (s1 * s2) ** 2, (s1 * s2 * s3) ** 2])
        )

    return GeometryPreset(
        "round_sphere4",
        metric,
        box=[(0, np.pi), (0, np.pi), (0, np.pi), (0, 2 * np.pi)],
        periodic=[False, False, False, True],
        nodes=nodes,
        params={"radius": r},
    )


def product_s2s2(radius1: float = 1.0, radius2: float = 1.0, nodes=(16, 12, 16, 12)) -> GeometryPreset:
    """Product of two round 2-spheres, coordinates (theta, phi, theta', phi')."""
    r1, r2 = float(radius1), float(radius2)
    if r1 <= 0 or r2 <= 0:
        raise ValueError("radii must be positive")

    def metric(x):
        return jnp.diag(
            jnp.array([r1**2, (r1 * jnp.sin(x[0])) ** 2, r2**2, (r2 * jnp.sin(x[2])) ** 2])
        )

    return GeometryPreset(
        "product_s2s2",
        metric,
        box=[(0, np.pi), (0, 2 * np.pi), (0, np.pi), (0, 2 * np.pi)],
        periodic=[False, True, False, True],
        nodes=nodes,
        params={"radius1": r1, "radius2": r2},
    )


DEFAULT_WARP = FourierSeries(1.0, cos_coeffs=(0.3,), sin_coeffs=(0.0, 0.1))


def warped_s1xs3(warp: FourierSeries = None, kappa: float = 1.0, nodes=(32, 16, 16, 12)) -> GeometryPreset:
    """S^1 x S^3 with metric dt^2 + f(t)^2 h, where h has constant curvature kappa.

    Coordinates (t, psi, theta, phi); the circle has unit length, the sphere
    factor has radius 1/sqrt(kappa) so that ric_h = 2 kappa h.
    """
    f = warp or DEFAULT_WARP
    k = float(kappa)
    if k <= 0:
        raise ValueError("kappa must be positive")
    if f.min_on_grid() <= 0:
        raise ValueError("warp function must be positive")
    rho2 = 1.0 / k

    def metric(x):
        ff = f(x[0]) ** 2 * rho2
        spsi, sth = jnp.sin(x[1]), jnp.sin(x[2])
        return jnp.diag(jnp.array([1.0, ff, ff * spsi**2, ff * (spsi * sth) ** 2]))

    return GeometryPreset(
        "warped_s1xs3",
        metric,
        box=[(0, 1), (0, np.pi), (0, np.pi), (0, 2 * np.pi)],
        periodic=[True, False, False, True],
        nodes=nodes,
        params={"warp": f.params(), "kappa": k},
    )


def warped_s1xt3(warp: FourierSeries = None, nodes=(32, 8, 8, 8)) -> GeometryPreset:
    """S^1 x T^3 with metric dt^2 + f(t)^2 (dx1^2 + dx2^2 + dx3^2), all periodic."""
    f = warp or DEFAULT_WARP
    if f.min_on_grid() <= 0:
        raise ValueError("warp function must be positive")

    def metric(x):
        ff = f(x[0]) ** 2
        return jnp.diag(jnp.array([1.0, ff, ff, ff]))

    return GeometryPreset(
        "warped_s1xt3",
        metric,
        box=[(0, 1)] * 4,
        periodic=[True] * 4,
        nodes=nodes,
        params={"warp": f.params()},
    )


_FACTORIES = {
    "flat_torus4": flat_torus4,
    "round_sphere4": round_sphere4,
    "product_s2s2": product_s2s2,
    "warped_s1xs3": warped_s1xs3,
    "warped_s1xt3": warped_s1xt3,
}


def make_preset(name: str, **params) -> GeometryPreset:
    """Build a registered preset by name; unknown names raise ValueError."""
    if name not in _FACTORIES:
        raise ValueError(f"unknown preset {name!r}; known: {sorted(_FACTORIES)}")
    if name in ("warped_s1xs3", "warped_s1xt3") and "warp" in params and isinstance(params["warp"], dict):
        p = params["warp"]
        params = dict(params, warp=FourierSeries(p.get("const", 1.0), p.get("cos", ()), p.get("sin", ())))
    return _FACTORIES[name](**params)

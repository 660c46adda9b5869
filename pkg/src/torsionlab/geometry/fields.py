"""Smooth torsion fields on the presets.

A :class:`TorsionField` supplies, at each chart point, the components of the
vectorial part V, the 3-form part T and the trace-free cyclic part S *in the
chart's orthonormal frame* (where the pointwise invariants reduce to the
identity-metric case).  The map must be JAX-traceable; derivatives to any
order come for free, which is what the curvature formulas need (order 2).

Fields built from constant frame tensors with smooth scalar amplitudes stay
in their subspaces pointwise because the subspaces are O(n)-invariant.

The named constructors at the bottom produce *globally* smooth 3-forms on
each closed preset (constant-coefficient forms on tori, the leaf volume
pullback on the warped product, the star of an exact 1-form on the sphere,
and a product form on S^2 x S^2); those are the right inputs for integral
identities, which need more than chart-interior smoothness.
"""

from __future__ import annotations

import itertools

import numpy as np

import jax
import jax.numpy as jnp

from ..multilinear import InnerSpace, KForm, alternation, perm_sign
from ..torsion import CartanComponents, sample_torsion
from .presets import FourierSeries, GeometryPreset

__all__ = [
    "TorsionField",
    "zero_field",
    "constant_field",
    "random_smooth_field",
    "volume_pullback_field",
    "torus_sheet_field",
    "sphere_coexact_field",
    "product_mixed_field",
    "canonical_smooth_field",
]

_EPS4 = np.zeros((4, 4, 4, 4))
for _p in itertools.permutations(range(4)):
    _EPS4[_p] = perm_sign(_p)
EPS4 = jnp.asarray(_EPS4)


class TorsionField:
    """Frame-component torsion field x -> (V, T, S)."""

    def __init__(self, frame_fn, description: str = "", params: dict = None):
        self.frame_fn = frame_fn
        self.description = description
        self.params = dict(params or {})
        self._cache: dict = {}

    def __call__(self, x):
        return self.frame_fn(jnp.asarray(x))

    def frame_tensor(self, x):
        """Full frame torsion tensor A = recompose(V, T, S) at x."""
        v, t, s = self.frame_fn(jnp.asarray(x))
        eye = jnp.eye(4)
        vec = jnp.einsum("ij,k->ijk", eye, v) - jnp.einsum("j,ik->ijk", v, eye)
        return vec + t + s

    def components_at(self, x) -> CartanComponents:
        """Pointwise components as numpy values (validates the invariants)."""
        v, t, s = (np.asarray(a) for a in self.frame_fn(jnp.asarray(x)))
        sp = InnerSpace(4)
        return CartanComponents(sp, v, KForm(t), s)


def _zero_triplet(x):
    z3 = jnp.zeros((4, 4, 4))
    return jnp.zeros(4), z3, z3


def zero_field() -> TorsionField:
    return TorsionField(_zero_triplet, "zero torsion")


def constant_field(c: CartanComponents) -> TorsionField:
    """Constant frame components from a pointwise decomposition."""
    v = jnp.asarray(c.vector)
    t = jnp.asarray(c.three_form.comps)
    s = jnp.asarray(c.cartan)

    def fn(x):
        return v, t, s

    return TorsionField(fn, "constant frame components")


def _smooth_scalars(preset: GeometryPreset, rng: np.random.Generator, count: int, amplitude: float):
    """Random smooth scalar amplitude functions adapted to the chart.

    Periodic axes contribute low-order trig factors, open (polar) axes enter
    through cos(x), which extends smoothly across the poles.
    """
    specs = []
    for _ in range(count):
        coeff = amplitude * rng.standard_normal()
        terms = []
        for ax, per in enumerate(preset.periodic):
            (lo, hi) = preset.box[ax]
            kind = int(rng.integers(0, 3))  # 0: const, 1: cos-type, 2: sin-type
            phase = float(rng.random())
            terms.append((ax, per, kind, phase, hi - lo))
        specs.append((coeff, tuple(terms)))

    def make(spec):
        coeff, terms = spec

        def fn(x):
            out = coeff
            for ax, per, kind, phase, span in terms:
                if kind == 0:
                    continue
                if per:
                    arg = 2 * jnp.pi * (x[ax] / span + phase)
                    out = out * (jnp.cos(arg) if kind == 1 else jnp.sin(arg))
                else:
                    c = jnp.cos(x[ax])
                    out = out * (c if kind == 1 else (0.5 + 0.5 * c * c))
            return out

        return fn

    return [make(s) for s in specs]


def random_smooth_field(
    preset: GeometryPreset,
    seed: int,
    classes: str = "antisymmetric",
    amplitude: float = 0.3,
    n_terms: int = 3,
) -> TorsionField:
    """Deterministic random field: constant subspace tensors times smooth amplitudes.

    ``classes`` is any combination of "v", "t", "s" ("antisymmetric" = "t",
    "full" = "vts").  Smooth on the chart interior; use the canonical
    constructors below when global smoothness matters.
    """
    alias = {"antisymmetric": "t", "full": "vts", "vectorial": "v", "cartan": "s"}
    classes = alias.get(classes, classes)
    if not set(classes) <= set("vts"):
        raise ValueError("classes must combine 'v', 't', 's'")
    rng = np.random.default_rng(seed)
    sp = InnerSpace(4)
    pieces = []  # (kind, constant array, amplitude fn)
    for kind in classes:
        amps = _smooth_scalars(preset, rng, n_terms, amplitude)
        for amp in amps:
            if kind == "v":
                const = jnp.asarray(rng.standard_normal(4))
                pieces.append(("v", const, amp))
            elif kind == "t":
                const = jnp.asarray(alternation(rng.standard_normal((4, 4, 4))))
                pieces.append(("t", const, amp))
            else:
                s = sample_torsion(sp, "cartan", seed=int(rng.integers(0, 2**31))).comps
                pieces.append(("s", jnp.asarray(s), amp))

    def fn(x):
        v = jnp.zeros(4)
        t = jnp.zeros((4, 4, 4))
        s = jnp.zeros((4, 4, 4))
        for kind, const, amp in pieces:
            a = amp(x)
            if kind == "v":
                v = v + a * const
            elif kind == "t":
                t = t + a * const
            else:
                s = s + a * const
        return v, t, s

    return TorsionField(fn, f"random smooth field ({classes})", {"seed": seed, "amplitude": amplitude})


def volume_pullback_field(preset: GeometryPreset, tau=None, tau_const: float = None) -> TorsionField:
    """T = tau(t) * pullback of the leaf volume form on warped_s1xs3.

    In the orthonormal frame the components are tau(t)/f(t)^3 on the three
    leaf directions, so |T|^2 = 6 tau^2 / f^6.  Globally smooth.
    """
    if preset.name != "warped_s1xs3":
        raise ValueError("volume_pullback_field requires the warped_s1xs3 preset")
    if tau is None:
        tau = FourierSeries(tau_const if tau_const is not None else 1.0)
    f = _warp_of(preset)
    leaf = jnp.asarray(_basis3_comps((1, 2, 3)))

    def fn(x):
        coeff = tau(x[0]) / f(x[0]) ** 3
        z3 = jnp.zeros((4, 4, 4))
        return jnp.zeros(4), coeff * leaf, z3

    tau_params = tau.params() if isinstance(tau, FourierSeries) else {}
    return TorsionField(fn, "leaf volume pullback", {"tau": tau_params})


def torus_sheet_field(preset: GeometryPreset, tau: FourierSeries = None) -> TorsionField:
    """T = tau(t) (dx1^dx2 + dx2^dx3 + dx3^dx1) ^ dt on warped_s1xt3.

    Frame components carry tau/f^2 on each mixed triple, |T|^2 = 18 (tau/f^2)^2.
    """
    if preset.name != "warped_s1xt3":
        raise ValueError("torus_sheet_field requires the warped_s1xt3 preset")
    tau = tau or FourierSeries(0.5, cos_coeffs=(0.2,))
    f = _warp_of(preset)
    sheet = jnp.asarray(
        _basis3_comps((1, 2, 0)) + _basis3_comps((2, 3, 0)) + _basis3_comps((3, 1, 0))
    )

    def fn(x):
        coeff = tau(x[0]) / f(x[0]) ** 2
        z3 = jnp.zeros((4, 4, 4))
        return jnp.zeros(4), coeff * sheet, z3

    return TorsionField(fn, "torus sheet ansatz", {"tau": tau.params()})


def sphere_coexact_field(preset: GeometryPreset, amplitude: float = 0.5) -> TorsionField:
    """T = amplitude * star(d h) on the round sphere, h = cos(theta_1).

    h extends to a smooth function on all of S^4 (a height function), so dT
    and T are globally smooth; star is taken in the chart frame.
    """
    if preset.name != "round_sphere4":
        raise ValueError("sphere_coexact_field requires the round_sphere4 preset")
    r = preset.params["radius"]

    def fn(x):
        # frame components of dh: E_1(h) along the first polar axis only
        u = jnp.array([-jnp.sin(x[0]) / r, 0.0, 0.0, 0.0])
        t = amplitude * jnp.einsum("a,abcd->bcd", u, EPS4)
        z3 = jnp.zeros((4, 4, 4))
        return jnp.zeros(4), t, z3

    return TorsionField(fn, "star of exact height 1-form", {"amplitude": amplitude})


def product_mixed_field(preset: GeometryPreset, amplitude: float = 0.5) -> TorsionField:
    """T = amplitude * dvol_1 ^ d(cos theta') on S^2 x S^2 (globally smooth)."""
    if preset.name != "product_s2s2":
        raise ValueError("product_mixed_field requires the product_s2s2 preset")
    r2 = preset.params["radius2"]
    base = jnp.asarray(_basis3_comps((0, 1, 2)))

    def fn(x):
        # frame: dvol_1 = e^0 ^ e^1, d cos(theta') = -sin(theta') dtheta' = -sin(theta') r2 e^2 / r2
        coeff = -amplitude * jnp.sin(x[2]) / r2
        z3 = jnp.zeros((4, 4, 4))
        return jnp.zeros(4), coeff * base, z3

    return TorsionField(fn, "sphere-volume wedge exact form", {"amplitude": amplitude})


def canonical_smooth_field(preset: GeometryPreset, amplitude: float = 0.5) -> TorsionField:
    """A globally smooth nonzero 3-form field appropriate for the preset."""
    if preset.name == "flat_torus4":
        sp = InnerSpace(4)
        t = sample_torsion(sp, "antisymmetric", seed=99).comps
        return constant_field(CartanComponents(sp, np.zeros(4), KForm(amplitude * t), np.zeros((4, 4, 4))))
    if preset.name == "round_sphere4":
        return sphere_coexact_field(preset, amplitude)
    if preset.name == "product_s2s2":
        return product_mixed_field(preset, amplitude)
    if preset.name == "warped_s1xs3":
        return volume_pullback_field(preset, FourierSeries(amplitude, cos_coeffs=(0.3 * amplitude,)))
    if preset.name == "warped_s1xt3":
        return torus_sheet_field(preset, FourierSeries(amplitude, cos_coeffs=(0.3 * amplitude,)))
    raise ValueError(f"no canonical field for preset {preset.name!r}")


def _basis3_comps(indices):
    out = np.zeros((4, 4, 4))
    for perm in itertools.permutations(range(3)):
        out[tuple(indices[p] for p in perm)] = perm_sign(perm)
    return out


def _warp_of(preset: GeometryPreset) -> FourierSeries:
    p = preset.params["warp"]
    return FourierSeries(p["const"], p["cos"], p["sin"])

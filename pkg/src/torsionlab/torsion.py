"""The space of torsion tensors and its decomposition into irreducible parts.

A torsion tensor is a (3,0)-tensor A anti-symmetric in its last two slots.
For dim >= 3 it splits orthogonally into three invariant pieces:

* vectorial:        A_xyz = <x,y><V,z> - <V,y><x,z>  for a vector V,
* totally anti-symmetric: a 3-form T,
* trace-free cyclic ("Cartan type"): S with S_xyz + S_yzx + S_zxy = 0 and
  vanishing trace over the first two slots.

In dim 2 the whole space is vectorial.  Three quadratic invariants span the
invariant quadratic forms: the squared norm, the first-two-slot-swapped
pairing <A, swap(A)>, and the squared norm of the (1,2)-trace.  On the three
pieces the swapped pairing evaluates to (n-1)|V|^2, -|T|^2 and |S|^2/2.

Projector formulas used by :func:`decompose` (the tests, not the formulas,
are normative): the vectorial part is recovered from the (1,2)-trace, the
anti-symmetric part is the cyclic average, and the Cartan part is the rest.

Throughout the package ``|T|^2`` for a 3-form always means the (3,0)-tensor
norm, i.e. 6x the form scalar product.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .multilinear import (
    COMPARISON_TOL,
    SYMMETRY_TOL,
    InnerSpace,
    KForm,
    sharp,
    tensor_inner,
)

__all__ = [
    "TorsionTensor",
    "CartanComponents",
    "QuadraticInvariants",
    "c12_trace",
    "invariants",
    "decompose",
    "recompose",
    "sample_torsion",
    "TORSION_CLASSES",
]

TORSION_CLASSES = ("full", "vectorial", "antisymmetric", "cartan")


def _scaled_tol(arr: np.ndarray, tol: float) -> float:
    return tol * max(1.0, float(np.max(np.abs(arr))) if arr.size else 0.0)


@dataclass(frozen=True)
class TorsionTensor:
    """(3,0)-tensor anti-symmetric in the last two slots."""

    space: InnerSpace
    comps: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.comps, dtype=float)
        n = self.space.dim
        if a.shape != (n, n, n):
            raise ValueError(f"expected shape {(n, n, n)}, got {a.shape}")
        if not np.allclose(a, -a.transpose(0, 2, 1), atol=_scaled_tol(a, SYMMETRY_TOL)):
            raise ValueError("torsion tensor must be anti-symmetric in the last two slots")
        object.__setattr__(self, "comps", a)

    def swapped(self) -> np.ndarray:
        """Components with the first two slots interchanged."""
        return self.comps.transpose(1, 0, 2)


@dataclass(frozen=True)
class CartanComponents:
    """The (V, T, S) data of a torsion tensor."""

    space: InnerSpace
    vector: np.ndarray  # V
    three_form: KForm  # T
    cartan: np.ndarray  # S, trace-free cyclic part

    def __post_init__(self):
        n = self.space.dim
        v = np.asarray(self.vector, dtype=float)
        s = np.asarray(self.cartan, dtype=float)
        if v.shape != (n,) or s.shape != (n, n, n) or self.three_form.comps.shape != (n,) * 3:
            raise ValueError("component shapes do not match the space")
        validate_cartan_part(s, self.space)
        if n == 2:
            if np.max(np.abs(self.three_form.comps)) > SYMMETRY_TOL or np.max(np.abs(s)) > SYMMETRY_TOL:
                raise ValueError("in dim 2 the 3-form and Cartan parts must vanish")
        object.__setattr__(self, "vector", v)
        object.__setattr__(self, "cartan", s)


def validate_cartan_part(s: np.ndarray, sp: InnerSpace, tol: float = COMPARISON_TOL):
    """Raise unless s is anti-symmetric in the last slots, cyclic-free and trace-free."""
    scale = _scaled_tol(s, tol)
    if not np.allclose(s, -s.transpose(0, 2, 1), atol=scale):
        raise ValueError("Cartan part must be anti-symmetric in the last two slots")
    cyc = s + s.transpose(1, 2, 0) + s.transpose(2, 0, 1)
    if np.max(np.abs(cyc)) > scale:
        raise ValueError("Cartan part must satisfy the cyclic identity")
    tr = np.einsum("ij,ijk->k", sp.inverse_metric, s)
    if np.max(np.abs(tr)) > scale:
        raise ValueError("Cartan part must be trace-free over the first two slots")


def c12_trace(a: TorsionTensor) -> np.ndarray:
    """Trace over the first two slots: the covector Z -> sum_i A(E_i, E_i, Z).

    Vanishes exactly on the anti-symmetric + Cartan subspace.
    """
    return np.einsum("ij,ijk->k", a.space.inverse_metric, a.comps)


class QuadraticInvariants(NamedTuple):
    norm_sq: float  # |A|^2
    twisted: float  # <A, swap(A)>
    trace_norm_sq: float  # |c12(A)|^2


def invariants(a: TorsionTensor) -> QuadraticInvariants:
    """The three quadratic invariants of a torsion tensor."""
    sp = a.space
    norm_sq = tensor_inner(a.comps, a.comps, sp)
    twisted = tensor_inner(a.comps, a.swapped(), sp)
    tr = c12_trace(a)
    trace_norm_sq = float(tr @ sp.inverse_metric @ tr)
    return QuadraticInvariants(norm_sq, twisted, trace_norm_sq)


def recompose(c: CartanComponents) -> TorsionTensor:
    """Assemble the torsion tensor A_xyz = <x,y><V,z> - <V,y><x,z> + T + S."""
    sp = c.space
    g = sp.metric
    vflat = g @ c.vector
    a = (
        np.einsum("ij,k->ijk", g, vflat)
        - np.einsum("j,ik->ijk", vflat, g)
        + c.three_form.comps
        + c.cartan
    )
    return TorsionTensor(sp, a)


def decompose(a: TorsionTensor) -> CartanComponents:
    """Split a torsion tensor into vectorial, anti-symmetric and Cartan parts.

    The round trip through :func:`recompose` is the identity, the projection
    is linear and idempotent, and the three parts are pairwise orthogonal for
    both invariant bilinear forms.  In dim 2 everything is vectorial.
    """
    sp = a.space
    n = sp.dim
    v = sharp(c12_trace(a), sp) / (n - 1)
    if n == 2:
        return CartanComponents(sp, v, KForm(np.zeros((n,) * 3)), np.zeros((n,) * 3))
    vec_part = recompose(CartanComponents(sp, v, KForm(np.zeros((n,) * 3)), np.zeros((n,) * 3)))
    t = (a.comps + a.comps.transpose(1, 2, 0) + a.comps.transpose(2, 0, 1)) / 3.0
    s = a.comps - vec_part.comps - t
    return CartanComponents(sp, v, KForm(t), s)


def sample_torsion(sp: InnerSpace, torsion_class: str, seed: int) -> TorsionTensor:
    """Deterministic pseudo-random torsion tensor in the requested subspace."""
    if torsion_class not in TORSION_CLASSES:
        raise ValueError(f"unknown torsion class {torsion_class!r}")
    n = sp.dim
    if n == 2 and torsion_class in ("antisymmetric", "cartan"):
        raise ValueError(f"class {torsion_class!r} is empty in dimension 2")
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((n, n, n))
    full = TorsionTensor(sp, raw - raw.transpose(0, 2, 1))
    if torsion_class == "full":
        return full
    parts = decompose(full)
    if torsion_class == "vectorial":
        keep = CartanComponents(sp, parts.vector, KForm(np.zeros((n,) * 3)), np.zeros((n,) * 3))
    elif torsion_class == "antisymmetric":
        keep = CartanComponents(sp, np.zeros(n), parts.three_form, np.zeros((n,) * 3))
    else:
        keep = CartanComponents(sp, np.zeros(n), KForm(np.zeros((n,) * 3)), parts.cartan)
    return recompose(keep)

"""Pointwise multilinear and exterior algebra over a real inner-product space.

Two scalar products are used throughout the package: the plain (k,0)-tensor
product (full contraction of all index pairs with the inverse metric) and the
k-form product, which is smaller by a factor 1/k!.

Conventions fixed here and relied on everywhere downstream:

* wedge normalisation without 1/k!:
  (e^{i_1} ^ ... ^ e^{i_k})(E_{j_1}, ..., E_{j_k}) = det(delta^{i}_{j}),
  so the tensor norm of e^1 ^ e^2 ^ e^3 in an orthonormal 4-space is 3! = 6;
* epsilon_{1...n} = +1 for positive orientation, hence in oriented orthonormal
  4-space  *(e^1 ^ e^2 ^ e^3) = +e^4  and  *1 = volume form with coefficient
  sqrt(det g);
* on k-forms ** = (-1)^{k(n-k)} (Riemannian signature).

Components are always stored densely on frame tuples (n <= 6, k <= 4, at most
1296 entries); "sum over increasing indices" appears only when talking to
formats that want it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "InnerSpace",
    "Tensor",
    "KForm",
    "tensor_inner",
    "form_inner",
    "hodge_star",
    "interior",
    "wedge",
    "sharp",
    "flat",
    "alternation",
    "basis_form",
    "levi_civita_symbol",
]

#: absolute comparison tolerance, scaled by max component magnitude
COMPARISON_TOL = 1e-12
#: tolerance for declared symmetries of freshly constructed values
SYMMETRY_TOL = 1e-13

_DIM_RANGE = range(2, 7)


def _scaled_tol(arr: np.ndarray, tol: float) -> float:
    return tol * max(1.0, float(np.max(np.abs(arr))) if arr.size else 0.0)


def perm_sign(perm) -> int:
    """Sign of a permutation given as a tuple of indices."""
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, cycle = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            cycle += 1
        if cycle % 2 == 0:
            sign = -sign
    return sign


def levi_civita_symbol(n: int) -> np.ndarray:
    """Totally anti-symmetric symbol with epsilon_{1...n} = +1."""
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        eps[perm] = perm_sign(perm)
    return eps


def alternation(comps: np.ndarray) -> np.ndarray:
    """Full anti-symmetrisation projector (idempotent)."""
    k = comps.ndim
    if k <= 1:
        return np.array(comps, dtype=float)
    out = np.zeros_like(comps, dtype=float)
    for perm in itertools.permutations(range(k)):
        out += perm_sign(perm) * np.transpose(comps, perm)
    return out / math.factorial(k)


@dataclass(frozen=True)
class InnerSpace:
    """A finite-dimensional oriented real inner-product space.

    ``metric`` is the Gram matrix of the chosen basis; the identity means the
    basis is orthonormal, which is the default working mode of the package.
    """

    dim: int
    metric: np.ndarray = None  # type: ignore[assignment]
    orientation: int = +1

    def __post_init__(self):
        if self.dim not in _DIM_RANGE:
            raise ValueError(f"dimension {self.dim} outside supported range 2..6")
        g = np.eye(self.dim) if self.metric is None else np.asarray(self.metric, dtype=float)
        if g.shape != (self.dim, self.dim):
            raise ValueError("metric shape does not match dimension")
        if not np.allclose(g, g.T, atol=_scaled_tol(g, SYMMETRY_TOL)):
            raise ValueError("metric must be symmetric")
        if np.min(np.linalg.eigvalsh(g)) <= 0:
            raise ValueError("metric must be positive definite")
        if self.orientation not in (+1, -1):
            raise ValueError("orientation must be +1 or -1")
        object.__setattr__(self, "metric", g)

    @property
    def inverse_metric(self) -> np.ndarray:
        return np.linalg.inv(self.metric)

    @property
    def is_orthonormal(self) -> bool:
        return bool(np.allclose(self.metric, np.eye(self.dim), atol=SYMMETRY_TOL))


@dataclass(frozen=True)
class Tensor:
    """Dense (k,0)-tensor: values on all basis k-tuples."""

    comps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "comps", np.asarray(self.comps, dtype=float))

    @property
    def rank(self) -> int:
        return self.comps.ndim

    @property
    def dim(self) -> int:
        return 0 if self.rank == 0 else self.comps.shape[0]


@dataclass(frozen=True)
class KForm(Tensor):
    """Fully anti-symmetric (k,0)-tensor."""

    def __post_init__(self):
        super().__post_init__()
        if self.rank >= 2:
            alt = alternation(self.comps)
            if not np.allclose(alt, self.comps, atol=_scaled_tol(self.comps, SYMMETRY_TOL)):
                raise ValueError("components are not anti-symmetric")


def _comps(t) -> np.ndarray:
    return t.comps if isinstance(t, Tensor) else np.asarray(t, dtype=float)


def _check_same_shape(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise ValueError(f"rank/dimension mismatch: {a.shape} vs {b.shape}")


def tensor_inner(s, t, sp: InnerSpace) -> float:
    """Natural scalar product of two (k,0)-tensors.

    Every slot is contracted with the inverse metric; on an orthonormal basis
    this is the plain sum of products of components.
    """
    a, b = _comps(s), _comps(t)
    _check_same_shape(a, b)
    if a.ndim == 0:
        return float(a * b)
    if a.shape[0] != sp.dim:
        raise ValueError("tensor dimension does not match the space")
    if sp.is_orthonormal:
        return float(np.sum(a * b))
    ginv = sp.inverse_metric
    raised = b
    for axis in range(b.ndim):
        raised = np.tensordot(raised, ginv, axes=(0, 0))  # cycles axes once per step
    return float(np.sum(a * raised))


def form_inner(omega, eta, sp: InnerSpace) -> float:
    """Scalar product of k-forms: tensor product divided by k!.

    For 2-forms this is half the tensor norm, for 3-forms one sixth.
    """
    a, b = _comps(omega), _comps(eta)
    _check_same_shape(a, b)
    return tensor_inner(a, b, sp) / math.factorial(a.ndim)


def flat(vector, sp: InnerSpace) -> np.ndarray:
    """Lower the index of a vector."""
    return sp.metric @ np.asarray(vector, dtype=float)


def sharp(covector, sp: InnerSpace) -> np.ndarray:
    """Raise the index of a covector; inverse of :func:`flat`."""
    return sp.inverse_metric @ np.asarray(covector, dtype=float)


def wedge(alpha, beta, sp: InnerSpace = None) -> KForm:
    """Wedge product with the determinant normalisation (no 1/k!).

    If the combined rank exceeds the dimension the zero form of that rank is
    returned (there is nothing else it could be).
    """
    a, b = _comps(alpha), _comps(beta)
    k, l = a.ndim, b.ndim
    if k == 0:
        return KForm(float(a) * b)
    if l == 0:
        return KForm(float(b) * a)
    n = a.shape[0]
    if k + l > n:
        return KForm(np.zeros((n,) * (k + l)))
    outer = np.multiply.outer(a, b)
    coeff = math.factorial(k + l) / (math.factorial(k) * math.factorial(l))
    return KForm(coeff * alternation(outer))


def interior(x, eta) -> KForm:
    """Contraction of a vector into the first slot of a k-form."""
    e = _comps(eta)
    if e.ndim == 0:
        raise ValueError("cannot contract into a 0-form")
    return KForm(np.tensordot(np.asarray(x, dtype=float), e, axes=(0, 0)))


def hodge_star(omega, sp: InnerSpace) -> KForm:
    """Hodge star; an isometry for the k-form scalar product.

    (*w)_{j_1..j_{n-k}} = sqrt(det g)/k! * w^{i_1..i_k} eps_{i_1..i_k j_1..j_{n-k}},
    times the orientation sign of the space.
    """
    w = _comps(omega)
    n, k = sp.dim, w.ndim
    if k > n:
        raise ValueError("form rank exceeds dimension")
    eps = levi_civita_symbol(n)
    sqrtg = math.sqrt(np.linalg.det(sp.metric))
    raised = w
    if not sp.is_orthonormal:
        ginv = sp.inverse_metric
        for _ in range(k):
            raised = np.tensordot(raised, ginv, axes=(0, 0))
    if k == 0:
        out = float(raised) * sqrtg * eps
    else:
        out = sqrtg / math.factorial(k) * np.tensordot(raised, eps, axes=(list(range(k)), list(range(k))))
    return KForm(sp.orientation * out)


def basis_form(indices, n: int) -> KForm:
    """The wedge of basis covectors e^{i_1} ^ ... ^ e^{i_k} (det normalisation)."""
    k = len(indices)
    if k == 0:
        return KForm(np.array(1.0))
    comps = np.zeros((n,) * k)
    for perm in itertools.permutations(range(k)):
        comps[tuple(indices[p] for p in perm)] = perm_sign(perm)
    return KForm(comps)

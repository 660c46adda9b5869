"""Clifford algebra representations and the action of torsion on spinors.

Sign conventions: generators satisfy g_i g_j + g_j g_i = -2 delta_ij, each
generator is anti-Hermitian and unitary, and the spinor space has complex
dimension 2^floor(n/2).  With these choices

    tr(g_a g_b g_c g_d) = 2^[n/2] (delta_bc delta_ad - delta_bd delta_ac)

for a != b, c != d, which fixes every trace identity downstream.

A k-form with tensor components w (anti-symmetric, values on all tuples) acts
on spinors as sum over increasing tuples of w_{i1..ik} g_{i1} ... g_{ik},
equivalently 1/k! times the sum over all tuples.  The torsion term of the
Dirac operator uses the tensor-component sum with a 1/4 prefactor, i.e. 3/2
times the form action for a 3-form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .multilinear import KForm
from .torsion import TorsionTensor

__all__ = [
    "GammaRep",
    "build_rep",
    "form_to_endo",
    "dirac_torsion_endo",
    "curvature_endos",
    "bochner_potential",
    "BochnerPotential",
]

CLIFFORD_TOL = 1e-13

_S1 = np.array([[0, 1], [1, 0]], dtype=complex)
_S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_S3 = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


def _kron_chain(mats) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


@dataclass(frozen=True)
class GammaRep:
    """Clifford generators of size 2^floor(n/2)."""

    dim: int
    gammas: np.ndarray  # (n, d, d) complex

    @property
    def spinor_dim(self) -> int:
        return self.gammas.shape[1]

    def validate(self, tol: float = CLIFFORD_TOL):
        n, d = self.dim, self.spinor_dim
        eye = np.eye(d)
        for i in range(n):
            gi = self.gammas[i]
            if np.max(np.abs(gi + gi.conj().T)) > tol:
                raise ValueError(f"generator {i} is not anti-Hermitian")
            if np.max(np.abs(gi @ gi.conj().T - eye)) > tol:
                raise ValueError(f"generator {i} is not unitary")
            for j in range(n):
                anticomm = gi @ self.gammas[j] + self.gammas[j] @ gi
                target = -2.0 * eye if i == j else 0.0
                if np.max(np.abs(anticomm - target)) > tol:
                    raise ValueError(f"Clifford relation fails for pair ({i}, {j})")

    def product(self, indices) -> np.ndarray:
        """Ordered product g_{i1} ... g_{ik} (identity for the empty tuple)."""
        out = np.eye(self.spinor_dim, dtype=complex)
        for i in indices:
            out = out @ self.gammas[i]
        return out

    def volume_element(self) -> np.ndarray:
        """Product of all generators (gamma5-analogue for n=4)."""
        return self.product(range(self.dim))


def build_rep(n: int) -> GammaRep:
    """Construct Clifford generators for 2 <= n <= 6.

    Even dimensions use iterated tensor products of Pauli blocks; odd
    dimensions append a suitably scaled product of all even-dimensional
    generators.  Any construction passing :meth:`GammaRep.validate` would do.
    """
    if not 2 <= n <= 6:
        raise ValueError(f"unsupported dimension {n}; need 2 <= n <= 6")
    m = n // 2
    gammas = []
    for a in range(m):
        prefix = [_S3] * a
        suffix = [_I2] * (m - a - 1)
        gammas.append(_kron_chain(prefix + [1j * _S1] + suffix))
        gammas.append(_kron_chain(prefix + [1j * _S2] + suffix))
    if n % 2 == 1:
        base = gammas[0]
        prod = np.eye(base.shape[0], dtype=complex)
        for g in gammas:
            prod = prod @ g
        extra = None
        for phase in (1.0, 1j, -1.0, -1j):
            cand = phase * prod
            sq_ok = np.max(np.abs(cand @ cand + np.eye(cand.shape[0]))) < CLIFFORD_TOL
            ah_ok = np.max(np.abs(cand + cand.conj().T)) < CLIFFORD_TOL
            if sq_ok and ah_ok:
                extra = cand
                break
        if extra is None:  # pragma: no cover - the phase always exists
            raise RuntimeError("no admissible phase for the odd generator")
        gammas.append(extra)
    rep = GammaRep(n, np.stack(gammas))
    rep.validate()
    return rep


def form_to_endo(omega, rep: GammaRep) -> np.ndarray:
    """Spinor endomorphism of a k-form: sum over increasing index tuples of
    component times generator product."""
    w = omega.comps if hasattr(omega, "comps") else np.asarray(omega)
    k = w.ndim
    if k > rep.dim:
        raise ValueError("form rank exceeds the representation dimension")
    d = rep.spinor_dim
    if k == 0:
        return float(w) * np.eye(d, dtype=complex)
    out = np.zeros((d, d), dtype=complex)
    for idx in itertools.combinations(range(rep.dim), k):
        c = w[idx]
        if c != 0.0:
            out += c * rep.product(idx)
    return out


def dirac_torsion_endo(a: TorsionTensor, rep: GammaRep) -> np.ndarray:
    """Torsion term of the Dirac operator: (1/4) sum_ijk A_ijk g_i g_j g_k.

    The Cartan part drops out identically (pointwise), and the result is
    Hermitian exactly when the vectorial part vanishes, which is the formal
    selfadjointness criterion for the full operator.
    """
    if a.space.dim != rep.dim:
        raise ValueError("torsion tensor and representation dimensions differ")
    n, d = rep.dim, rep.spinor_dim
    out = np.zeros((d, d), dtype=complex)
    for i, j, k in itertools.product(range(n), repeat=3):
        c = a.comps[i, j, k]
        if c != 0.0:
            out += c * rep.product((i, j, k))
    return 0.25 * out


def curvature_endos(riem: np.ndarray, rep: GammaRep, tol: float = 1e-9) -> np.ndarray:
    """Spinor curvature endomorphisms O_ij = 1/4 sum_ab riem_ijab g_a g_b.

    ``riem`` must be anti-symmetric in slots (1,2) and (3,4); the contracted
    double trace satisfies sum_ij tr(O_ij O_ij) = -2^[n/2]/8 * |riem|^2.
    """
    r = np.asarray(riem, dtype=float)
    n = rep.dim
    if r.shape != (n, n, n, n):
        raise ValueError("curvature tensor shape does not match the representation")
    scale = tol * max(1.0, float(np.max(np.abs(r))))
    if np.max(np.abs(r + r.transpose(1, 0, 2, 3))) > scale:
        raise ValueError("curvature tensor must be anti-symmetric in slots (1,2)")
    if np.max(np.abs(r + r.transpose(0, 1, 3, 2))) > scale:
        raise ValueError("curvature tensor must be anti-symmetric in slots (3,4)")
    pair = np.stack([[rep.gammas[a] @ rep.gammas[b] for b in range(n)] for a in range(n)])
    return 0.25 * np.einsum("ijab,abxy->ijxy", r, pair)


class BochnerPotential(NamedTuple):
    endo: np.ndarray
    trace: complex
    trace_sq: complex


def bochner_potential(dt_form: KForm, scalar_curv: float, torsion_norm_sq: float, rep: GammaRep) -> BochnerPotential:
    """Potential E with D^2 = Laplacian - E for anti-symmetric torsion, n = 4:

        E = -(3/2) endo(dT) - (1/4) R^g Id + (3/4) |T|^2 Id.

    Reports tr(E) = -R^g + 3|T|^2 and
    tr(E^2) = (1/4)(R^g)^2 - (3/2) R^g |T|^2 + (9/4)|T|^4 + (9/24)|dT|^2.
    """
    if rep.dim != 4:
        raise ValueError("the Bochner potential is implemented for n = 4")
    eye = np.eye(rep.spinor_dim, dtype=complex)
    e = -1.5 * form_to_endo(dt_form, rep) + (-0.25 * scalar_curv + 0.75 * torsion_norm_sq) * eye
    return BochnerPotential(e, np.trace(e), np.trace(e @ e))

"""Chart-based curvature with torsion, differentials of torsion, integration.

All pointwise quantities come out of one JAX trace per (preset, field) pair
and are reported in the chart's orthonormal frame.  The frame is built from
the Cholesky factor of the metric (equivalent to Gram-Schmidt on the ordered
coordinate basis, hence deterministic per chart); tensors are converted by
contracting each slot with the frame matrix.

Index conventions, fixed once:

* ``dg[i, j, m] = d_m g_ij`` (forward-mode jacobians append the derivative
  axis last; covariant derivatives below move it to the front);
* ``christoffel[k, i, j] = Gamma^k_ij``;
* ``riem[i, j, k, l] = <Riem(E_i, E_j) E_k, E_l>``;
* ``ric[j, k] = sum_i riem[i, j, k, i]`` (trace over the first slot);
* ``nabla_T[m, i1, ..., ir] = (nabla_m T)_{i1...ir}``.

The torsion-modified connection is nabla_X Y = nabla^g_X Y + s A(X,Y)^sharp.
Its curvature keeps the slot-(3,4) anti-symmetry but in general loses the
pair symmetry and the first Bianchi identity, hence the symmetric and
anti-symmetric splits carried in the pack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

import jax
import jax.numpy as jnp

from ..multilinear import InnerSpace
from .fields import EPS4, TorsionField, zero_field
from .presets import GeometryPreset, NumericalDomainError

__all__ = [
    "CurvaturePack",
    "levi_civita_pack",
    "torsion_pack",
    "exterior_d",
    "codiff",
    "codiff_via_star",
    "bach",
    "einstein",
    "g_eta",
    "integrate",
    "euler_characteristic",
    "EULER_METHODS",
]

EULER_METHODS = ("gauss_bonnet", "decomposed", "levi_civita")

_CHUNK = 16384


# --------------------------------------------------------------------------
# coordinate-level building blocks
# --------------------------------------------------------------------------

def _christoffel_fn(metric_fn):
    """Gamma^k_ij of the Levi-Civita connection as a function of x."""

    def gamma(x):
        ginv = jnp.linalg.inv(metric_fn(x))
        dg = jax.jacfwd(metric_fn)(x)
        # lower symbol Gamma_{l,ij} = 1/2 (d_i g_lj + d_j g_li - d_l g_ij)
        lower = 0.5 * (dg.transpose(0, 2, 1) + dg - dg.transpose(2, 0, 1))
        return jnp.einsum("kl,lij->kij", ginv, lower)

    return gamma


def _covariant_derivative_fn(tensor_fn, gamma_fn, rank):
    """nabla of an (r,0)-tensor field; derivative slot first."""

    def nabla(x):
        dT = jnp.moveaxis(jax.jacfwd(tensor_fn)(x), -1, 0)
        if rank == 0:
            return dT
        G = gamma_fn(x)
        T = tensor_fn(x)
        out = dT
        for slot in range(rank):
            corr = jnp.tensordot(G, T, axes=(0, slot))  # (m, new, other slots)
            out = out - jnp.moveaxis(corr, 1, slot + 1)
        return out

    return nabla


def _frame(g):
    """Orthonormal frame e[i, a] (columns are frame vectors) and coframe theta[a, i]."""
    L = jnp.linalg.cholesky(g)
    e = jnp.linalg.inv(L).T
    return e, L.T


def _to_frame(tensor, e):
    """Contract every slot of a coordinate (k,0)-tensor with the frame."""
    out = tensor
    for _ in range(tensor.ndim):
        out = jnp.tensordot(out, e, axes=(0, 0))  # cycles axes; k steps restore order
    return out


def _lc_state(metric_fn, x):
    """All Levi-Civita data at x, in one trace."""
    g = metric_fn(x)
    ginv = jnp.linalg.inv(g)
    gamma_fn = _christoffel_fn(metric_fn)
    gamma = gamma_fn(x)
    dgamma = jnp.moveaxis(jax.jacfwd(gamma_fn)(x), -1, 0)  # (m, k, i, j) = d_m Gamma^k_ij
    # R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
    r_up = (
        jnp.einsum("iljk->lijk", dgamma)
        - jnp.einsum("jlik->lijk", dgamma)
        + jnp.einsum("lim,mjk->lijk", gamma, gamma)
        - jnp.einsum("ljm,mik->lijk", gamma, gamma)
    )
    riem = jnp.einsum("lm,mijk->ijkl", g, r_up)
    ric = jnp.einsum("iijk->jk", r_up)
    scal = jnp.einsum("jk,jk->", ginv, ric)
    e, theta = _frame(g)
    riem_f = _to_frame(riem, e)
    ric_f = _to_frame(ric, e)
    weyl_f = _weyl_from_frame(riem_f, ric_f, scal)
    return {
        "g": g,
        "ginv": ginv,
        "gamma": gamma,
        "frame": e,
        "coframe": theta,
        "riem_g": riem_f,
        "ric_g": ric_f,
        "R_g": scal,
        "weyl": weyl_f,
        "riem_g_coord": riem,
        "ric_g_coord": ric,
    }


def _weyl_from_frame(riem_f, ric_f, scal, n=4):
    """Ricci decomposition in an orthonormal frame; returns the trace-free part."""
    eye = jnp.eye(n)
    b = ric_f - (scal / n) * eye
    scal_block = (scal / (n * (n - 1))) * (
        jnp.einsum("il,jk->ijkl", eye, eye) - jnp.einsum("jl,ik->ijkl", eye, eye)
    )
    b_block = (
        jnp.einsum("il,jk->ijkl", b, eye)
        - jnp.einsum("jl,ik->ijkl", b, eye)
        + jnp.einsum("il,jk->ijkl", eye, b)
        - jnp.einsum("jl,ik->ijkl", eye, b)
    ) / (n - 2)
    return riem_f - scal_block - b_block


def _field_coord_tensor_fn(metric_fn, frame_fn):
    """Coordinate components of the full frame torsion tensor A(V,T,S)."""

    def a_coord(x):
        v, t, s = frame_fn(x)
        eye = jnp.eye(4)
        a_f = jnp.einsum("ij,k->ijk", eye, v) - jnp.einsum("j,ik->ijk", v, eye) + t + s
        _, theta = _frame(metric_fn(x))
        return jnp.einsum("abc,ai,bj,ck->ijk", a_f, theta, theta, theta)

    return a_coord


def _three_form_coord_fn(metric_fn, frame_fn):
    def t_coord(x):
        _, t, _ = frame_fn(x)
        _, theta = _frame(metric_fn(x))
        return jnp.einsum("abc,ai,bj,ck->ijk", t, theta, theta, theta)

    return t_coord


def _vector_coord_fn(metric_fn, frame_fn):
    def v_coord(x):
        v, _, _ = frame_fn(x)
        e, _ = _frame(metric_fn(x))
        return jnp.einsum("a,ia->i", v, e)

    return v_coord


def _torsion_state(metric_fn, frame_fn, x, s):
    """LC state plus field data and torsion-modified curvature at x.

    Field-derived quantities (nabla_T, dT, delta_T, div_V, B_T and norms) are
    reported for the *unscaled* field; the modified curvature uses s * A.
    """
    lc = _lc_state(metric_fn, x)
    e = lc["frame"]
    gamma_fn = _christoffel_fn(metric_fn)

    v_f, t_f, s_f = frame_fn(x)
    eye = jnp.eye(4)
    a_f = jnp.einsum("ij,k->ijk", eye, v_f) - jnp.einsum("j,ik->ijk", v_f, eye) + t_f + s_f

    a_coord_fn = _field_coord_tensor_fn(metric_fn, frame_fn)
    nabla_a = _covariant_derivative_fn(a_coord_fn, gamma_fn, 3)(x)
    nabla_a_f = _to_frame(nabla_a, e)

    t_coord_fn = _three_form_coord_fn(metric_fn, frame_fn)
    nabla_t = _covariant_derivative_fn(t_coord_fn, gamma_fn, 3)(x)
    nabla_t_f = _to_frame(nabla_t, e)

    # exterior differential and codifferential of the 3-form part
    dt_f = (
        nabla_t_f
        - nabla_t_f.transpose(1, 0, 2, 3)
        + jnp.einsum("cabd->abcd", nabla_t_f)
        - jnp.einsum("dabc->abcd", nabla_t_f)
    )
    delta_t_f = -jnp.einsum("iabi->ab", nabla_t_f)

    v_coord_fn = _vector_coord_fn(metric_fn, frame_fn)
    nabla_v = _covariant_derivative_fn(v_coord_fn, gamma_fn, 0)(x)  # (m, i) = d_m V^i
    gamma = lc["gamma"]
    div_v = jnp.trace(nabla_v) + jnp.einsum("iim,m->", gamma, v_coord_fn(x))

    # torsion-modified curvature with A_s = s * A
    a_s = s * a_f
    na_s = s * nabla_a_f
    riem = (
        lc["riem_g"]
        + jnp.einsum("abcd->abcd", na_s)
        - jnp.einsum("bacd->abcd", na_s)
        + jnp.einsum("bce,aed->abcd", a_s, a_s)
        - jnp.einsum("ace,bed->abcd", a_s, a_s)
    )
    ric = (
        lc["ric_g"]
        + jnp.einsum("iabi->ab", na_s)
        - jnp.einsum("aibi->ab", na_s)
        - jnp.einsum("abe,iie->ab", a_s, a_s)
        + jnp.einsum("ibe,aie->ab", a_s, a_s)
    )
    scal = jnp.trace(ric)

    riem_s_part = 0.5 * (riem + riem.transpose(2, 3, 0, 1))
    riem_a_part = 0.5 * (riem - riem.transpose(2, 3, 0, 1))
    ric_s_part = 0.5 * (ric + ric.T)
    ric_a_part = 0.5 * (ric - ric.T)

    b_t = jnp.einsum("ik,ije,kje->", lc["ric_g"], t_f, t_f) + 0.25 * lc["R_g"] * jnp.sum(t_f * t_f)

    out = dict(lc)
    out.update(
        {
            "V": v_f,
            "T": t_f,
            "S": s_f,
            "A": a_f,
            "nabla_A": nabla_a_f,
            "nabla_T": nabla_t_f,
            "dT": dt_f,
            "delta_T": delta_t_f,
            "div_V": div_v,
            "B_T": b_t,
            "s": s,
            "riem": riem,
            "ric": ric,
            "R": scal,
            "riem_S": riem_s_part,
            "riem_A": riem_a_part,
            "ric_S": ric_s_part,
            "ric_A": ric_a_part,
        }
    )
    return out


# --------------------------------------------------------------------------
# packs
# --------------------------------------------------------------------------

@dataclass
class CurvaturePack:
    """Curvature data at one point, in the chart's orthonormal frame."""

    preset_name: str
    x: np.ndarray
    s: float
    christoffel: np.ndarray
    frame: np.ndarray
    riem_g: np.ndarray
    ric_g: np.ndarray
    R_g: float
    weyl: np.ndarray
    einstein: np.ndarray
    # field data (unscaled), present also for the pure LC pack (zeros there)
    V: np.ndarray
    T: np.ndarray
    S: np.ndarray
    nabla_T: np.ndarray
    dT: np.ndarray
    delta_T: np.ndarray
    div_V: float
    B_T: float
    # torsion-modified curvature (with s * field)
    riem: np.ndarray
    ric: np.ndarray
    R: float
    riem_S: np.ndarray
    riem_A: np.ndarray
    ric_S: np.ndarray
    ric_A: np.ndarray
    bach: Optional[np.ndarray] = None

    def validate(self, tol_riem=1e-9, tol_weyl=1e-8):
        """Check the structural invariants of the pack."""
        scale = max(1.0, float(np.max(np.abs(self.riem_g))))
        pair = np.max(np.abs(self.riem_g - self.riem_g.transpose(2, 3, 0, 1)))
        bianchi = np.max(
            np.abs(self.riem_g + self.riem_g.transpose(1, 2, 0, 3) + self.riem_g.transpose(2, 0, 1, 3))
        )
        if pair > tol_riem * scale or bianchi > tol_riem * scale:
            raise NumericalDomainError("Levi-Civita curvature lost its symmetries")
        wscale = max(1.0, float(np.max(np.abs(self.weyl))))
        for axes in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
            tr = np.trace(self.weyl, axis1=axes[0], axis2=axes[1])
            if np.max(np.abs(tr)) > tol_weyl * wscale:
                raise NumericalDomainError("Weyl tensor is not trace-free")
        anti34 = np.max(np.abs(self.riem + self.riem.transpose(0, 1, 3, 2)))
        if anti34 > tol_riem * max(1.0, float(np.max(np.abs(self.riem)))):
            raise NumericalDomainError("torsion curvature lost slot-(3,4) anti-symmetry")
        return self

    @property
    def norm_riem_sq(self) -> float:
        return float(np.sum(self.riem**2))

    @property
    def norm_ric_sq(self) -> float:
        return float(np.sum(self.ric**2))


def _state_to_pack(preset, x, s, st) -> CurvaturePack:
    a = {k: np.asarray(v) for k, v in st.items()}
    ein = a["ric_g"] - 0.5 * a["R_g"] * np.eye(4)
    return CurvaturePack(
        preset_name=preset.name,
        x=np.asarray(x, dtype=float),
        s=float(s),
        christoffel=a["gamma"],
        frame=a["frame"],
        riem_g=a["riem_g"],
        ric_g=a["ric_g"],
        R_g=float(a["R_g"]),
        weyl=a["weyl"],
        einstein=ein,
        V=a["V"],
        T=a["T"],
        S=a["S"],
        nabla_T=a["nabla_T"],
        dT=a["dT"],
        delta_T=a["delta_T"],
        div_V=float(a["div_V"]),
        B_T=float(a["B_T"]),
        riem=a["riem"],
        ric=a["ric"],
        R=float(a["R"]),
        riem_S=a["riem_S"],
        riem_A=a["riem_A"],
        ric_S=a["ric_S"],
        ric_A=a["ric_A"],
    )


def _torsion_state_fn(preset: GeometryPreset, field: TorsionField):
    key = ("state", id(field))
    if key not in preset._cache:
        fn = jax.jit(lambda s, x: _torsion_state(preset.metric, field.frame_fn, x, s))
        preset._cache[key] = fn
    return preset._cache[key]


def torsion_pack(preset: GeometryPreset, field: TorsionField, x, s: float = 1.0) -> CurvaturePack:
    """Full curvature pack of the connection with torsion s * field at x."""
    st = _torsion_state_fn(preset, field)(float(s), jnp.asarray(x, dtype=float))
    if not np.isfinite(float(st["R"])):
        raise NumericalDomainError(f"curvature evaluation left the domain at x={x}")
    return _state_to_pack(preset, x, s, st)


def levi_civita_pack(preset: GeometryPreset, x) -> CurvaturePack:
    """Levi-Civita pack (the torsion slots are zero)."""
    return torsion_pack(preset, zero_field(), x, s=0.0)


# --------------------------------------------------------------------------
# differential operators on the 3-form part
# --------------------------------------------------------------------------

def exterior_d(preset: GeometryPreset, field: TorsionField, x) -> np.ndarray:
    """dT at x as a frame 4-form (anti-symmetric component of the field only)."""
    st = _torsion_state_fn(preset, field)(1.0, jnp.asarray(x, dtype=float))
    return np.asarray(st["dT"])


def codiff(preset: GeometryPreset, field: TorsionField, x) -> np.ndarray:
    """delta T at x as a frame 2-form, from the frame formula."""
    st = _torsion_state_fn(preset, field)(1.0, jnp.asarray(x, dtype=float))
    return np.asarray(st["delta_T"])


def _star_frame(form, k):
    """Hodge star on frame components in oriented orthonormal 4-space."""
    if k == 0:
        return form * EPS4
    return jnp.tensordot(form, EPS4, axes=(list(range(k)), list(range(k)))) / math.factorial(k)


def codiff_via_star(preset: GeometryPreset, field: TorsionField, x) -> np.ndarray:
    """delta T at x computed as -*d*T (the 4-manifold adjoint identity)."""
    key = ("codiff_star", id(field))
    if key not in preset._cache:
        metric_fn = preset.metric

        def star_t_coord(x_):
            _, t_f, _ = field.frame_fn(x_)
            u_f = _star_frame(t_f, 3)  # frame 1-form
            _, theta = _frame(metric_fn(x_))
            return jnp.einsum("a,ai->i", u_f, theta)

        def delta_fn(x_):
            du = jnp.moveaxis(jax.jacfwd(star_t_coord)(x_), -1, 0)  # (m, i) = d_m u_i
            dform = du - du.T  # coordinate 2-form d(*T)
            e, _ = _frame(metric_fn(x_))
            dform_f = _to_frame(dform, e)
            return -_star_frame(dform_f, 2)

        preset._cache[key] = jax.jit(delta_fn)
    return np.asarray(preset._cache[key](jnp.asarray(x, dtype=float)))


# --------------------------------------------------------------------------
# Bach, Einstein, g_eta
# --------------------------------------------------------------------------

def _weyl_coord_fn(metric_fn):
    """Coordinate Weyl tensor as a function of x (needed under two more derivatives)."""

    def weyl(x):
        st = _lc_state(metric_fn, x)
        g, ginv = st["g"], st["ginv"]
        riem, ric, scal = st["riem_g_coord"], st["ric_g_coord"], st["R_g"]
        n = 4
        b = ric - (scal / n) * g
        scal_block = (scal / (n * (n - 1))) * (
            jnp.einsum("il,jk->ijkl", g, g) - jnp.einsum("jl,ik->ijkl", g, g)
        )
        b_block = (
            jnp.einsum("il,jk->ijkl", b, g)
            - jnp.einsum("jl,ik->ijkl", b, g)
            + jnp.einsum("il,jk->ijkl", g, b)
            - jnp.einsum("jl,ik->ijkl", g, b)
        ) / (n - 2)
        return riem - scal_block - b_block

    return weyl


def bach(preset: GeometryPreset, x) -> np.ndarray:
    """Bach tensor at x in the orthonormal frame.

    B_ij = nabla^k nabla^l C_kijl + 1/2 ric^kl C_kijl; symmetric and
    trace-free, and zero on conformally flat or Einstein geometries, which is
    the normative numerical check.  Needs fourth metric derivatives.
    """
    key = ("bach",)
    if key not in preset._cache:
        metric_fn = preset.metric
        gamma_fn = _christoffel_fn(metric_fn)
        weyl_fn = _weyl_coord_fn(metric_fn)
        d1 = _covariant_derivative_fn(weyl_fn, gamma_fn, 4)
        d2 = _covariant_derivative_fn(d1, gamma_fn, 5)

        def bach_fn(x_):
            st = _lc_state(metric_fn, x_)
            ginv, ric = st["ginv"], st["ric_g_coord"]
            c = weyl_fn(x_)
            dd = d2(x_)  # (a, b, k, i, j, l) = nabla_a nabla_b C_kijl
            term1 = jnp.einsum("ka,lb,abkijl->ij", ginv, ginv, dd)
            ric_up = jnp.einsum("ka,lb,ab->kl", ginv, ginv, ric)
            term2 = 0.5 * jnp.einsum("kl,kijl->ij", ric_up, c)
            b_coord = term1 + term2
            e, _ = _frame(st["g"])
            return _to_frame(b_coord, e)

        preset._cache[key] = jax.jit(bach_fn)
    out = np.asarray(preset._cache[key](jnp.asarray(x, dtype=float)))
    if not np.all(np.isfinite(out)):
        raise NumericalDomainError("Bach evaluation left the numeric domain")
    return out


def einstein(pack: CurvaturePack) -> np.ndarray:
    """Einstein tensor G = ric_g - R_g/2 g of the pack's base metric (frame)."""
    return pack.ric_g - 0.5 * pack.R_g * np.eye(4)


def g_eta(eta, sp: InnerSpace) -> np.ndarray:
    """The symmetric 2-tensor g^eta(X, Y) = <X . eta, Y . eta>_form.

    For 1-forms this is eta (x) eta; for k >= 2 the contractions are paired
    with the form scalar product of the (k-1)-forms X . eta.
    """
    w = eta.comps if hasattr(eta, "comps") else np.asarray(eta, dtype=float)
    k = w.ndim
    if k < 1:
        raise ValueError("g_eta needs a form of rank >= 1")
    rest = list(range(1, k))
    if sp.is_orthonormal:
        out = np.tensordot(w, w, axes=(rest, rest))
    else:
        raised = w
        for _ in range(k - 1):  # raise trailing slots one by one (order-preserving cycle)
            raised = np.tensordot(raised, sp.inverse_metric, axes=(1, 0))
        out = np.tensordot(w, raised, axes=(rest, rest))
    return out / math.factorial(k - 1)


# --------------------------------------------------------------------------
# integration and the Euler characteristic
# --------------------------------------------------------------------------

def integrate(fn, preset: GeometryPreset, nodes=None, threads: int = None) -> float:
    """Integral over the preset of a JAX-traceable scalar field fn(x).

    The volume density sqrt(det g) is supplied here; ``fn`` sees chart
    coordinates.  Summation is chunked in a fixed order, so results are
    bit-stable for identical inputs.
    """
    pts, w = preset.quadrature(nodes)
    key = ("integrand", id(fn))
    if key not in preset._cache:
        preset._cache[key] = jax.jit(jax.vmap(fn))
    vfn = preset._cache[key]
    dens = preset.sqrt_det(pts)
    total = 0.0
    for start in range(0, len(pts), _CHUNK):
        sl = slice(start, start + _CHUNK)
        vals = np.asarray(vfn(jnp.asarray(pts[sl])))
        if not np.all(np.isfinite(vals)):
            raise NumericalDomainError("non-finite integrand value on a quadrature node")
        total += float(np.sum(w[sl] * dens[sl] * vals))
    return total


def _euler_density_fn(preset: GeometryPreset, field: TorsionField, s: float, method: str):
    metric_fn = preset.metric
    frame_fn = field.frame_fn

    if method == "levi_civita":

        def density(x):
            st = _lc_state(metric_fn, x)
            riem, ric, scal = st["riem_g"], st["ric_g"], st["R_g"]
            return (scal**2 - 4 * jnp.sum(ric**2) + jnp.sum(riem**2)) / (8 * jnp.pi**2)

        return density

    if method == "decomposed":

        def density(x):
            st = _torsion_state(metric_fn, frame_fn, x, s)
            return (
                st["R"] ** 2
                - 4 * jnp.sum(st["ric_S"] ** 2)
                + 4 * jnp.sum(st["ric_A"] ** 2)
                + jnp.sum(st["riem_S"] ** 2)
                - jnp.sum(st["riem_A"] ** 2)
            ) / (8 * jnp.pi**2)

        return density

    if method == "gauss_bonnet":

        def density(x):
            st = _torsion_state(metric_fn, frame_fn, x, s)
            riem = st["riem"]
            return jnp.einsum("ijkl,nmsp,ijnm,klsp->", EPS4, EPS4, riem, riem) / (32 * jnp.pi**2)

        return density

    raise ValueError(f"unknown Euler method {method!r}; known: {EULER_METHODS}")


def euler_characteristic(
    preset: GeometryPreset,
    field: TorsionField = None,
    s: float = 1.0,
    method: str = "levi_civita",
    nodes=None,
) -> float:
    """Euler characteristic by integrating a curvature density.

    ``gauss_bonnet`` integrates the Pfaffian-type density of the torsion
    connection, ``decomposed`` its expansion in curvature norms, and
    ``levi_civita`` the classical form; all three agree (the value is a
    topological invariant and independent of s and the field).
    """
    field = field or zero_field()
    key = ("euler", id(field), float(s), method)
    if key not in preset._cache:
        preset._cache[key] = _euler_density_fn(preset, field, float(s), method)
    return integrate(preset._cache[key], preset, nodes=nodes)

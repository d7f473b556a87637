"""Hot per-node kernels: embedding, fundamental forms, principal curvatures.

Two interchangeable backends compute the principal-curvature batch used in
the solver's inner loop: a numba-compiled node loop and a vectorized numpy
fallback.  Selection happens at import time: numba is used when it imports
cleanly and the environment variable ``CURVEDUAL_NO_NUMBA`` is unset.  Both
paths implement the same arithmetic and agree to roundoff.

All angles are chart coordinates (theta, phi) on the parameter sphere; the
radial inputs are the chart partial derivatives of the radial function.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly by backend selection
    from numba import njit

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrapper(func):
            return func
        return wrapper


USE_NUMBA = _HAVE_NUMBA and not os.environ.get("CURVEDUAL_NO_NUMBA")


def backend_name() -> str:
    """Active principal-curvature backend: 'numba' or 'numpy'."""
    return "numba" if USE_NUMBA else "numpy"


@njit(cache=True, fastmath=False)
def _kappa_batch_jit(theta, phi, R, RT, RP, RTT, RTP, RPP, K1, K2):
    npts, nb = R.shape
    for i in range(npts):
        st = np.sin(theta[i])
        ct = np.cos(theta[i])
        sp = np.sin(phi[i])
        cp = np.cos(phi[i])
        # unit direction and its chart derivatives (3-vector parts)
        w0 = st * cp
        w1 = st * sp
        w2 = ct
        wt0 = ct * cp
        wt1 = ct * sp
        wt2 = -st
        wp0 = -st * sp
        wp1 = st * cp
        wtp0 = -ct * sp
        wtp1 = ct * cp
        for j in range(nb):
            r = R[i, j]
            rt = RT[i, j]
            rp = RP[i, j]
            rtt = RTT[i, j]
            rtp = RTP[i, j]
            rpp = RPP[i, j]
            sr = np.sin(r)
            cr = np.cos(r)
            # embedding x = (sin r * w, cos r) and its chart derivatives
            x0 = sr * w0
            x1 = sr * w1
            x2 = sr * w2
            x3 = cr
            a = cr * rt
            xt0 = a * w0 + sr * wt0
            xt1 = a * w1 + sr * wt1
            xt2 = a * w2 + sr * wt2
            xt3 = -sr * rt
            b = cr * rp
            xp0 = b * w0 + sr * wp0
            xp1 = b * w1 + sr * wp1
            xp2 = b * w2
            xp3 = -sr * rp
            c1 = cr * rtt - sr * rt * rt
            xtt0 = c1 * w0 + 2.0 * a * wt0 - sr * w0
            xtt1 = c1 * w1 + 2.0 * a * wt1 - sr * w1
            xtt2 = c1 * w2 + 2.0 * a * wt2 - sr * w2
            xtt3 = -(sr * rtt + cr * rt * rt)
            c2 = cr * rtp - sr * rt * rp
            xtp0 = c2 * w0 + a * wp0 + b * wt0 + sr * wtp0
            xtp1 = c2 * w1 + a * wp1 + b * wt1 + sr * wtp1
            xtp2 = c2 * w2 + b * wt2
            xtp3 = -(sr * rtp + cr * rt * rp)
            c3 = cr * rpp - sr * rp * rp
            xpp0 = c3 * w0 + 2.0 * b * wp0 - sr * w0
            xpp1 = c3 * w1 + 2.0 * b * wp1 - sr * w1
            xpp2 = c3 * w2
            xpp3 = -(sr * rpp + cr * rp * rp)
            # metric
            g11 = xt0 * xt0 + xt1 * xt1 + xt2 * xt2 + xt3 * xt3
            g12 = xt0 * xp0 + xt1 * xp1 + xt2 * xp2 + xt3 * xp3
            g22 = xp0 * xp0 + xp1 * xp1 + xp2 * xp2 + xp3 * xp3
            # normal within the 3-sphere: 4d cross of (x, x_t, x_p)
            n0 = (x1 * (xt2 * xp3 - xt3 * xp2)
                  - x2 * (xt1 * xp3 - xt3 * xp1)
                  + x3 * (xt1 * xp2 - xt2 * xp1))
            n1 = -(x0 * (xt2 * xp3 - xt3 * xp2)
                   - x2 * (xt0 * xp3 - xt3 * xp0)
                   + x3 * (xt0 * xp2 - xt2 * xp0))
            n2 = (x0 * (xt1 * xp3 - xt3 * xp1)
                  - x1 * (xt0 * xp3 - xt3 * xp0)
                  + x3 * (xt0 * xp1 - xt1 * xp0))
            n3 = -(x0 * (xt1 * xp2 - xt2 * xp1)
                   - x1 * (xt0 * xp2 - xt2 * xp0)
                   + x2 * (xt0 * xp1 - xt1 * xp0))
            nn = np.sqrt(n0 * n0 + n1 * n1 + n2 * n2 + n3 * n3)
            n0 /= nn
            n1 /= nn
            n2 /= nn
            n3 /= nn
            # orient outward: positive component along the radial direction
            rad = (n0 * w0 + n1 * w1 + n2 * w2) * cr - n3 * sr
            if rad < 0.0:
                n0 = -n0
                n1 = -n1
                n2 = -n2
                n3 = -n3
            h11 = -(xtt0 * n0 + xtt1 * n1 + xtt2 * n2 + xtt3 * n3)
            h12 = -(xtp0 * n0 + xtp1 * n1 + xtp2 * n2 + xtp3 * n3)
            h22 = -(xpp0 * n0 + xpp1 * n1 + xpp2 * n2 + xpp3 * n3)
            detg = g11 * g22 - g12 * g12
            s11 = (g22 * h11 - g12 * h12) / detg
            s12 = (g22 * h12 - g12 * h22) / detg
            s21 = (g11 * h12 - g12 * h11) / detg
            s22 = (g11 * h22 - g12 * h12) / detg
            tr = s11 + s22
            disc = (s11 - s22) * (s11 - s22) + 4.0 * s12 * s21
            if disc < 0.0:
                disc = 0.0
            sq = np.sqrt(disc)
            K1[i, j] = 0.5 * (tr - sq)
            K2[i, j] = 0.5 * (tr + sq)


def _frame_fields(theta, phi):
    """Direction field and chart derivatives, each shaped (..., 3)."""
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    zero = np.zeros_like(st)
    w = np.stack([st * cp, st * sp, ct], axis=-1)
    wt = np.stack([ct * cp, ct * sp, -st], axis=-1)
    wp = np.stack([-st * sp, st * cp, zero], axis=-1)
    wtp = np.stack([-ct * sp, ct * cp, zero], axis=-1)
    wpp = np.stack([-st * cp, -st * sp, zero], axis=-1)
    return w, wt, wp, wtp, wpp


def embedding_derivatives(theta, phi, r, rt, rp, rtt, rtp, rpp):
    """Embedding of the radial graph and its chart derivatives in R^4.

    Inputs broadcast together; outputs gain a trailing axis of length 4.
    The pole sits at the fourth coordinate axis.
    """
    w, wt, wp, wtp, wpp = _frame_fields(theta, phi)
    sr = np.sin(r)[..., None]
    cr = np.cos(r)[..., None]
    rt_ = np.asarray(rt)[..., None]
    rp_ = np.asarray(rp)[..., None]
    rtt_ = np.asarray(rtt)[..., None]
    rtp_ = np.asarray(rtp)[..., None]
    rpp_ = np.asarray(rpp)[..., None]

    def four(vec3, last):
        return np.concatenate([vec3, last], axis=-1)

    x = four(sr * w, cr)
    xt = four(cr * rt_ * w + sr * wt, -sr * rt_)
    xp = four(cr * rp_ * w + sr * wp, -sr * rp_)
    xtt = four((cr * rtt_ - sr * rt_**2) * w + 2 * cr * rt_ * wt + sr * (-w),
               -(sr * rtt_ + cr * rt_**2))
    xtp = four((cr * rtp_ - sr * rt_ * rp_) * w + cr * (rt_ * wp + rp_ * wt) + sr * wtp,
               -(sr * rtp_ + cr * rt_ * rp_))
    xpp = four((cr * rpp_ - sr * rp_**2) * w + 2 * cr * rp_ * wp + sr * wpp,
               -(sr * rpp_ + cr * rp_**2))
    return x, xt, xp, xtt, xtp, xpp


def cross4(u, v, w):
    """Generalized cross product in R^4, orthogonal to u, v, w (..., 4)."""
    out = np.empty_like(u)
    idx = [(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)]
    sign = 1.0
    for a, (i, j, k) in enumerate(idx):
        det = (u[..., i] * (v[..., j] * w[..., k] - v[..., k] * w[..., j])
               - u[..., j] * (v[..., i] * w[..., k] - v[..., k] * w[..., i])
               + u[..., k] * (v[..., i] * w[..., j] - v[..., j] * w[..., i]))
        out[..., a] = sign * det
        sign = -sign
    return out


def fundamental_forms(theta, phi, r, rt, rp, rtt, rtp, rpp):
    """Full geometric data at each node (vectorized numpy path).

    Returns a dict with the embedding, tangents, outward unit normal,
    metric, second fundamental form, shape operator, and principal
    curvatures (ascending).
    """
    x, xt, xp, xtt, xtp, xpp = embedding_derivatives(
        theta, phi, r, rt, rp, rtt, rtp, rpp)
    g11 = np.einsum("...i,...i->...", xt, xt)
    g12 = np.einsum("...i,...i->...", xt, xp)
    g22 = np.einsum("...i,...i->...", xp, xp)
    nrm = cross4(x, xt, xp)
    nrm /= np.linalg.norm(nrm, axis=-1, keepdims=True)
    w, _, _, _, _ = _frame_fields(theta, phi)
    radial = np.concatenate([np.cos(r)[..., None] * w,
                             -np.sin(r)[..., None]], axis=-1)
    flip = np.einsum("...i,...i->...", nrm, radial) < 0
    nrm[flip] *= -1.0
    h11 = -np.einsum("...i,...i->...", xtt, nrm)
    h12 = -np.einsum("...i,...i->...", xtp, nrm)
    h22 = -np.einsum("...i,...i->...", xpp, nrm)
    detg = g11 * g22 - g12**2
    s11 = (g22 * h11 - g12 * h12) / detg
    s12 = (g22 * h12 - g12 * h22) / detg
    s21 = (g11 * h12 - g12 * h11) / detg
    s22 = (g11 * h22 - g12 * h12) / detg
    tr = s11 + s22
    disc = np.maximum((s11 - s22) ** 2 + 4 * s12 * s21, 0.0)
    sq = np.sqrt(disc)
    kappa = np.stack([0.5 * (tr - sq), 0.5 * (tr + sq)], axis=-1)
    g = np.stack([np.stack([g11, g12], -1), np.stack([g12, g22], -1)], -2)
    hh = np.stack([np.stack([h11, h12], -1), np.stack([h12, h22], -1)], -2)
    shape_op = np.stack([np.stack([s11, s12], -1), np.stack([s21, s22], -1)], -2)
    return {
        "x": x, "x_theta": xt, "x_phi": xp, "normal": nrm,
        "g": g, "h": hh, "shape_operator": shape_op, "kappa": kappa,
        "radial_direction": radial,
    }


def _kappa_batch_numpy(theta, phi, R, RT, RP, RTT, RTP, RPP):
    out = fundamental_forms(theta[:, None], phi[:, None], R, RT, RP, RTT, RTP, RPP)
    kap = out["kappa"]
    return kap[..., 0], kap[..., 1]


def kappa_batch(theta, phi, R, RT, RP, RTT, RTP, RPP):
    """Principal curvatures for a batch of radial fields.

    ``theta``/``phi`` have shape (N,); the six field arrays (N, nb).
    Returns (kappa_min, kappa_max) arrays of shape (N, nb), using the
    selected backend.
    """
    R = np.ascontiguousarray(R, dtype=float)
    shape = R.shape
    if USE_NUMBA:
        K1 = np.empty(shape)
        K2 = np.empty(shape)
        _kappa_batch_jit(theta, phi,
                         R,
                         np.ascontiguousarray(RT, dtype=float),
                         np.ascontiguousarray(RP, dtype=float),
                         np.ascontiguousarray(RTT, dtype=float),
                         np.ascontiguousarray(RTP, dtype=float),
                         np.ascontiguousarray(RPP, dtype=float),
                         K1, K2)
        return K1, K2
    return _kappa_batch_numpy(theta, phi, R, RT, RP, RTT, RTP, RPP)

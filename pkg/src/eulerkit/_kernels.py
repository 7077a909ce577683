"""Compiled inner loops for the structured-grid scheme.

Each time-integration stage runs three passes over padded (ghost-augmented)
arrays: a node pass evaluating the EOS, an edge pass computing the certified
wave speed and the dissipative interface flux, and an update pass.  Edge
fluxes are computed once per edge and differenced, so conservation telescopes
exactly and d_ij = d_ji holds bitwise.

The EOS and wave-speed formulas mirror eulerkit.eos / eulerkit.wavespeed up
to reassociation (divisions are traded for multiplications by the inverse
density, and reference-curve prefactors are hoisted out of the loops), so the
compiled and numpy paths agree to rounding, which the test suite pins.
Kernels come in serial and parallel flavors; callers pick by problem size.
"""

from __future__ import annotations

import types

import numpy as np
from numba import njit, prange

MACAW_TAG = 0
DAVIS_TAG = 1
STIFFENED_TAG = 2

_EXP_ARG_MAX = 700.0
_FAST = {"cache": True, "fastmath": True}


@njit(inline="always", **_FAST)
def _macaw_quants(r, tau, e, tau0, g0, a, b, inv_tau0):
    x = tau * inv_tau0
    u = x ** (-b)
    x_inv = tau0 * r
    ecold = a * tau0 * (u + b * x - (b + 1.0))
    ux = u * x_inv
    pcold = a * b * (ux - 1.0)
    kcold = a * b * (b + 1.0) * ux
    de = e - ecold
    gr = g0 * r
    p = pcold + gr * de
    kk = kcold + gr * (g0 + 1.0) * de
    return p, kk, de


@njit(inline="always", **_FAST)
def _davis_quants(r, tau, e, par, inv_tau0, c_es, c_ps, c_ks):
    g0 = par[1]
    b = par[4]
    cc = par[5]
    z = par[6]
    e0 = par[9]
    y = 1.0 - tau * inv_tau0
    fy = 4.0 * b * y
    if y < 0.0:
        ey = np.exp(fy)
        es = e0 + c_es * (ey - fy - 1.0)
        ps = c_ps * (ey - 1.0)
        ks = c_ks * (1.0 - y) * ey
        gam = g0
        gp = 0.0
    else:
        omy = 1.0 - y
        omy_inv = 1.0 / omy
        omy_inv2 = omy_inv * omy_inv
        omy_inv5 = omy_inv2 * omy_inv2 * omy_inv
        fy2 = fy * fy
        es = e0 + c_es * (
            fy2 / 2.0
            + fy2 * fy / 6.0
            + fy2 * fy2 / 24.0
            + cc * fy2 * fy2 * fy / 120.0
            + 4.0 * b * y * y * y / 3.0 * (omy_inv2 * omy_inv)
        )
        ps = c_ps * (
            fy + fy2 / 2.0 + fy2 * fy / 6.0 + cc * fy2 * fy2 / 24.0 + y * y * (omy_inv2 * omy_inv2)
        )
        ks = c_ks * omy * (
            fy2 / 2.0 + fy + 1.0 + cc * fy2 * fy / 6.0 + y * (y + 1.0) / (2.0 * b) * omy_inv5
        )
        gam = g0 + z * y
        gp = -z * inv_tau0
    de = e - es
    p = ps + gam * r * de
    kk = ks + (gam * (gam + 1.0) * r - gp) * de
    return p, kk, de


@njit(inline="always", **_FAST)
def _stiffened_quants(r, tau, e, g, pinf, q):
    de = e - (q + pinf * tau)
    p = (g - 1.0) * (e - q) * r - g * pinf
    kk = g * (p + pinf)
    return p, kk, de


@njit(inline="always", **_FAST)
def _quants(tag, par, der, r, tau, e):
    """(p, K, margin) dispatch; ``der`` holds hoisted derived constants."""
    if tag == 0:
        return _macaw_quants(r, tau, e, par[0], par[1], par[2], par[3], der[0])
    elif tag == 1:
        return _davis_quants(r, tau, e, par, der[0], der[1], der[2], der[3])
    return _stiffened_quants(r, tau, e, par[0], par[1], par[2])


def derived_constants(tag, par):
    """Loop-invariant factors the kernels would otherwise divide for."""
    if tag == 0:
        return np.array([1.0 / par[0]], dtype=np.float64)
    if tag == 1:
        a2 = par[3] * par[3]
        return np.array(
            [1.0 / par[0], a2 / (16.0 * par[4] * par[4]), a2 / (4.0 * par[4] * par[0]), a2 / par[0]],
            dtype=np.float64,
        )
    return np.zeros(1, dtype=np.float64)


@njit(inline="always", **_FAST)
def _edge_lambda(vL, pL, kL, ikL, cL, lkL, sqL, vR, pR, kR, ikR, cR, lkR, sqR):
    """Certified max wave speed for one edge (general, unequal states)."""
    dv = vR - vL
    if pL <= pR:
        p_lo = pL
        p_hi = pR
        k_hi = kR
        ik_hi = ikR
        c_hi = cR
        k_lo = kL
        sq_lo = sqL
    else:
        p_lo = pR
        p_hi = pL
        k_hi = kL
        ik_hi = ikL
        c_hi = cL
        k_lo = kR
        sq_lo = sqR
    arg_min = (p_lo - p_hi) + k_hi
    if arg_min > 0.0:
        phi_min = c_hi * np.log(arg_min * ik_hi) + dv
    else:
        phi_min = -np.inf
    if phi_min >= 0.0:
        p_hat = p_lo
    else:
        pinf_l = kL - pL
        pinf_r = kR - pR
        pinf_min = min(pinf_l, pinf_r)
        arg = (cL * lkL + cR * lkR - dv) / (cL + cR)
        if arg > _EXP_ARG_MAX:
            arg = _EXP_ARG_MAX
        p_rr = np.exp(arg) - pinf_min
        dp = p_hi - p_lo
        phi_max = dp / (sq_lo * np.sqrt(dp + k_lo)) + dv
        if phi_max >= 0.0:
            p_hat = min(p_hi, p_rr)
        else:
            pinf_max = max(pinf_l, pinf_r)
            aa = sqL + sqR
            bb = sqL * sqR * dv
            ccoef = -sqR * (pL + pinf_max) - sqL * (pR + pinf_max)
            root = (-bb + np.sqrt(bb * bb - 4.0 * aa * ccoef)) / (2.0 * aa)
            p_ss = root * root - pinf_max
            p_hat = min(p_rr, p_ss)
    lam_l = vL - cL * np.sqrt(max((p_hat - pL) * ikL, 0.0) + 1.0)
    lam_r = vR + cR * np.sqrt(max((p_hat - pR) * ikR, 0.0) + 1.0)
    return max(abs(lam_l), abs(lam_r))


# ---------------------------------------------------------------------------
# kernel bodies; compiled twice (serial / parallel) by _build below
# ---------------------------------------------------------------------------


def _node_pass_1d(tag, par, der, rho, mx, en, p, kk, c, lk, sq, margin, v, ik):
    n = rho.shape[0]
    for i in prange(n):
        r = rho[i]
        tau = 1.0 / r
        vx = mx[i] * tau
        e = en[i] * tau - 0.5 * vx * vx
        pp, k, de = _quants(tag, par, der, r, tau, e)
        p[i] = pp
        kk[i] = k
        c[i] = np.sqrt(tau * k)
        lk[i] = np.log(k)
        sq[i] = np.sqrt(r)
        margin[i] = de
        v[i] = vx
        ik[i] = 1.0 / k


def _fused_stage_1d(tag, par, der, rho, mx, en, w, lam, g_r, g_m, g_e, mins):
    """Node and edge work in one chunked sweep; ``mins`` collects per-chunk
    (margin, pressure, bulk-modulus) minima.

    Chunks are a fixed partition of the edge range, so the reductions do not
    depend on the thread count.  Each chunk walks its edges sequentially,
    carrying the left node's quantities in registers; identical neighbor
    states skip both the EOS and the estimate, which also covers constant
    regions.  Values match the separate node/edge passes bit for bit.
    """
    ne = rho.shape[0] - 1
    nch = mins.shape[0]
    csz = (ne + nch - 1) // nch
    for ch in prange(nch):
        k0 = ch * csz
        k1 = min(k0 + csz, ne)
        m_margin = np.inf
        m_p = np.inf
        m_k = np.inf
        if k0 < k1:
            rl = rho[k0]
            ml = mx[k0]
            el = en[k0]
            tau = 1.0 / rl
            vl = ml * tau
            e = el * tau - 0.5 * vl * vl
            p_l, k_l, de_l = _quants(tag, par, der, rl, tau, e)
            c_l = np.sqrt(tau * k_l)
            lk_l = np.log(k_l)
            sq_l = np.sqrt(rl)
            ik_l = 1.0 / k_l
            m_margin = de_l
            m_p = p_l
            m_k = k_l
            for k in range(k0, k1):
                rr = rho[k + 1]
                mr = mx[k + 1]
                er = en[k + 1]
                if rr == rl and mr == ml and er == el:
                    vr = vl
                    p_r = p_l
                    k_r = k_l
                    c_r = c_l
                    lk_r = lk_l
                    sq_r = sq_l
                    ik_r = ik_l
                    de_r = de_l
                    la = max(abs(vl - c_l), abs(vl + c_l))
                else:
                    tau = 1.0 / rr
                    vr = mr * tau
                    e = er * tau - 0.5 * vr * vr
                    p_r, k_r, de_r = _quants(tag, par, der, rr, tau, e)
                    c_r = np.sqrt(tau * k_r)
                    lk_r = np.log(k_r)
                    sq_r = np.sqrt(rr)
                    ik_r = 1.0 / k_r
                    la = _edge_lambda(
                        vl, p_l, k_l, ik_l, c_l, lk_l, sq_l,
                        vr, p_r, k_r, ik_r, c_r, lk_r, sq_r,
                    )
                m_margin = min(m_margin, de_r)
                m_p = min(m_p, p_r)
                m_k = min(m_k, k_r)
                lam[k] = la
                d = la * w
                g_r[k] = w * (ml + mr) - d * (rr - rl)
                g_m[k] = w * (ml * vl + p_l + mr * vr + p_r) - d * (mr - ml)
                g_e[k] = w * (vl * (el + p_l) + vr * (er + p_r)) - d * (er - el)
                rl = rr
                ml = mr
                el = er
                vl = vr
                p_l = p_r
                k_l = k_r
                c_l = c_r
                lk_l = lk_r
                sq_l = sq_r
                ik_l = ik_r
                de_l = de_r
        mins[ch, 0] = m_margin
        mins[ch, 1] = m_p
        mins[ch, 2] = m_k


def _edge_pass_1d(rho, mx, en, p, kk, c, lk, sq, v, ik, w, lam, g_r, g_m, g_e):
    ne = rho.shape[0] - 1
    for k in prange(ne):
        rl = rho[k]
        rr = rho[k + 1]
        ml = mx[k]
        mr = mx[k + 1]
        el = en[k]
        er = en[k + 1]
        pl = p[k]
        pr = p[k + 1]
        vl = v[k]
        vr = v[k + 1]
        if rl == rr and ml == mr and el == er:
            cc = c[k]
            la = max(abs(vl - cc), abs(vl + cc))
        else:
            la = _edge_lambda(
                vl, pl, kk[k], ik[k], c[k], lk[k], sq[k],
                vr, pr, kk[k + 1], ik[k + 1], c[k + 1], lk[k + 1], sq[k + 1],
            )
        lam[k] = la
        d = la * w
        g_r[k] = w * (ml + mr) - d * (rr - rl)
        g_m[k] = w * (ml * vl + pl + mr * vr + pr) - d * (mr - ml)
        g_e[k] = w * (vl * (el + pl) + vr * (er + pr)) - d * (er - el)


def _update_1d(rho, mx, en, g_r, g_m, g_e, dtm, rho_o, mx_o, en_o):
    n = rho_o.shape[0]
    for i in prange(n):
        rho_o[i] = rho[i + 1] - dtm * (g_r[i + 1] - g_r[i])
        mx_o[i] = mx[i + 1] - dtm * (g_m[i + 1] - g_m[i])
        en_o[i] = en[i + 1] - dtm * (g_e[i + 1] - g_e[i])


def _node_pass_2d(tag, par, der, rho, mx, my, en, p, kk, c, lk, sq, margin, vx_a, vy_a, ik):
    nx = rho.shape[0]
    ny = rho.shape[1]
    for i in prange(nx):
        for j in range(ny):
            r = rho[i, j]
            tau = 1.0 / r
            vx = mx[i, j] * tau
            vy = my[i, j] * tau
            e = en[i, j] * tau - 0.5 * (vx * vx + vy * vy)
            pp, k, de = _quants(tag, par, der, r, tau, e)
            p[i, j] = pp
            kk[i, j] = k
            c[i, j] = np.sqrt(tau * k)
            lk[i, j] = np.log(k)
            sq[i, j] = np.sqrt(r)
            margin[i, j] = de
            vx_a[i, j] = vx
            vy_a[i, j] = vy
            ik[i, j] = 1.0 / k


def _edge_pass_2d_x(rho, mx, my, en, p, kk, c, lk, sq, vx_a, vy_a, ik, w,
                    lam, g_r, g_mx, g_my, g_e):
    # edge (k, j) joins padded nodes (k, j+1) and (k+1, j+1); normal = +x
    ne = lam.shape[0]
    ny = lam.shape[1]
    for k in prange(ne):
        for j in range(ny):
            jj = j + 1
            rl = rho[k, jj]
            rr = rho[k + 1, jj]
            mxl = mx[k, jj]
            mxr = mx[k + 1, jj]
            myl = my[k, jj]
            myr = my[k + 1, jj]
            el = en[k, jj]
            er = en[k + 1, jj]
            pl = p[k, jj]
            pr = p[k + 1, jj]
            vl = vx_a[k, jj]
            vr = vx_a[k + 1, jj]
            if rl == rr and mxl == mxr and myl == myr and el == er:
                cc = c[k, jj]
                la = max(abs(vl - cc), abs(vl + cc))
            else:
                la = _edge_lambda(
                    vl, pl, kk[k, jj], ik[k, jj], c[k, jj], lk[k, jj], sq[k, jj],
                    vr, pr, kk[k + 1, jj], ik[k + 1, jj], c[k + 1, jj], lk[k + 1, jj], sq[k + 1, jj],
                )
            lam[k, j] = la
            d = la * w
            g_r[k, j] = w * (mxl + mxr) - d * (rr - rl)
            g_mx[k, j] = w * (mxl * vl + pl + mxr * vr + pr) - d * (mxr - mxl)
            g_my[k, j] = w * (myl * vl + myr * vr) - d * (myr - myl)
            g_e[k, j] = w * (vl * (el + pl) + vr * (er + pr)) - d * (er - el)


def _edge_pass_2d_y(rho, mx, my, en, p, kk, c, lk, sq, vx_a, vy_a, ik, w,
                    lam, g_r, g_mx, g_my, g_e):
    # edge (i, k) joins padded nodes (i+1, k) and (i+1, k+1); normal = +y
    nx = lam.shape[0]
    ne = lam.shape[1]
    for i in prange(nx):
        ii = i + 1
        for k in range(ne):
            rl = rho[ii, k]
            rr = rho[ii, k + 1]
            mxl = mx[ii, k]
            mxr = mx[ii, k + 1]
            myl = my[ii, k]
            myr = my[ii, k + 1]
            el = en[ii, k]
            er = en[ii, k + 1]
            pl = p[ii, k]
            pr = p[ii, k + 1]
            vl = vy_a[ii, k]
            vr = vy_a[ii, k + 1]
            if rl == rr and mxl == mxr and myl == myr and el == er:
                cc = c[ii, k]
                la = max(abs(vl - cc), abs(vl + cc))
            else:
                la = _edge_lambda(
                    vl, pl, kk[ii, k], ik[ii, k], c[ii, k], lk[ii, k], sq[ii, k],
                    vr, pr, kk[ii, k + 1], ik[ii, k + 1], c[ii, k + 1], lk[ii, k + 1], sq[ii, k + 1],
                )
            lam[i, k] = la
            d = la * w
            g_r[i, k] = w * (myl + myr) - d * (rr - rl)
            g_mx[i, k] = w * (mxl * vl + mxr * vr) - d * (mxr - mxl)
            g_my[i, k] = w * (myl * vl + pl + myr * vr + pr) - d * (myr - myl)
            g_e[i, k] = w * (vl * (el + pl) + vr * (er + pr)) - d * (er - el)


def _update_2d(rho, mx, my, en, gx_r, gx_mx, gx_my, gx_e, gy_r, gy_mx, gy_my, gy_e, dtm,
               rho_o, mx_o, my_o, en_o):
    nx = rho_o.shape[0]
    ny = rho_o.shape[1]
    for i in prange(nx):
        for j in range(ny):
            rho_o[i, j] = rho[i + 1, j + 1] - dtm * (
                (gx_r[i + 1, j] - gx_r[i, j]) + (gy_r[i, j + 1] - gy_r[i, j])
            )
            mx_o[i, j] = mx[i + 1, j + 1] - dtm * (
                (gx_mx[i + 1, j] - gx_mx[i, j]) + (gy_mx[i, j + 1] - gy_mx[i, j])
            )
            my_o[i, j] = my[i + 1, j + 1] - dtm * (
                (gx_my[i + 1, j] - gx_my[i, j]) + (gy_my[i, j + 1] - gy_my[i, j])
            )
            en_o[i, j] = en[i + 1, j + 1] - dtm * (
                (gx_e[i + 1, j] - gx_e[i, j]) + (gy_e[i, j + 1] - gy_e[i, j])
            )


def _convex_combine_1d(a_r, a_m, a_e, b_r, b_m, b_e, wb, o_r, o_m, o_e):
    # increment form: exact when b == a, so constants survive bit-for-bit
    n = o_r.shape[0]
    for i in prange(n):
        o_r[i] = a_r[i] + wb * (b_r[i] - a_r[i])
        o_m[i] = a_m[i] + wb * (b_m[i] - a_m[i])
        o_e[i] = a_e[i] + wb * (b_e[i] - a_e[i])


_BODIES = {
    "node_1d": _node_pass_1d,
    "edge_1d": _edge_pass_1d,
    "fused_1d": _fused_stage_1d,
    "update_1d": _update_1d,
    "combine_1d": _convex_combine_1d,
    "node_2d": _node_pass_2d,
    "edge_2d_x": _edge_pass_2d_x,
    "edge_2d_y": _edge_pass_2d_y,
    "update_2d": _update_2d,
}

# chunk count for the fused sweep's reductions: a fixed partition keeps the
# minima independent of the number of worker threads
FUSED_CHUNKS = 64


def _clone(fn, suffix):
    # distinct function objects give the serial and parallel flavors distinct
    # on-disk cache entries; sharing one object makes the flavors clobber
    # each other's cached machine code
    g = types.FunctionType(fn.__code__, fn.__globals__, name=fn.__name__ + suffix,
                           argdefs=fn.__defaults__, closure=fn.__closure__)
    g.__qualname__ = fn.__qualname__ + suffix
    return g


def _build(parallel):
    suffix = "_par" if parallel else "_ser"
    out = {}
    for name, fn in _BODIES.items():
        # the convex combine must match the numpy expression bit-for-bit, so
        # no fastmath (an FMA contraction would change the rounding)
        opts = dict(_FAST, parallel=parallel)
        if name == "combine_1d":
            opts["fastmath"] = False
        out[name] = njit(**opts)(_clone(fn, suffix))
    return out


SERIAL = _build(parallel=False)
PARALLEL = _build(parallel=True)

# below this many real nodes the parallel-region overhead outweighs the win
PARALLEL_THRESHOLD = 16384


def kernels_for(n_nodes: int):
    return PARALLEL if n_nodes >= PARALLEL_THRESHOLD else SERIAL

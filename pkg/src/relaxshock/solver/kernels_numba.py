"""Compiled stencil kernels (numba). Mirrors :mod:`kernels_numpy` exactly in math.

Layout: ``q[c, i, j, k]`` with ``c`` per :mod:`relaxshock.solver.grid`. Index
``i`` (xi1) uses clamped ghost cells, ``j`` and ``k`` are periodic. 3-D loops
over ``i`` run in parallel; every output cell is written by exactly one
iteration, so results do not depend on the thread count. 1-D grids use
serial kernels on flattened views (parallel launch would dominate).
"""
import math

import numpy as np
from numba import njit, prange

def _periodic(n, s):
    return (np.arange(n) + s) % n


@njit(parallel=True, cache=True)
def _rhs_kernel(q, pv, out, sigma, dx1, dx2, dx3, hyp, jp1, jm1, jp2, jm2, kp1, km1, kp2, km2):
    nc, n1, n2, n3 = q.shape
    r1, r2, r3 = 0.5 / dx1, 0.5 / dx2, 0.5 / dx3
    h1, h2, h3 = hyp / dx1, hyp / dx2, hyp / dx3
    for i in prange(n1):
        im1, im2 = max(i - 1, 0), max(i - 2, 0)
        ip1, ip2 = min(i + 1, n1 - 1), min(i + 2, n1 - 1)
        # transport and hyperdissipation, one component at a time
        for c in range(nc):
            for j in range(n2):
                ja, jb, jc, jd = jp1[j], jm1[j], jp2[j], jm2[j]
                for k in range(n3):
                    f0 = q[c, i, j, k]
                    a1 = q[c, ip1, j, k]
                    b1 = q[c, im1, j, k]
                    a2 = q[c, i, ja, k]
                    b2 = q[c, i, jb, k]
                    a3 = q[c, i, j, kp1[k]]
                    b3 = q[c, i, j, km1[k]]
                    d1 = (q[c, ip2, j, k] + q[c, im2, j, k]) - 4.0 * (a1 + b1) + 6.0 * f0
                    d2 = (q[c, i, jc, k] + q[c, i, jd, k]) - 4.0 * (a2 + b2) + 6.0 * f0
                    d3 = (q[c, i, j, kp2[k]] + q[c, i, j, km2[k]]) - 4.0 * (a3 + b3) + 6.0 * f0
                    g1 = (a1 - b1) * r1
                    out[c, i, j, k] = ((sigma * g1 - (q[1, i, j, k] * g1 + q[2, i, j, k] * ((a2 - b2) * r2)
                                                      + q[3, i, j, k] * ((a3 - b3) * r3)))
                                       - (h1 * d1 + h2 * d2 + h3 * d3))
        # pressure, stress divergence and velocity divergence
        for j in range(n2):
            ja, jb = jp1[j], jm1[j]
            for k in range(n3):
                ka, kb = kp1[k], km1[k]
                v = q[0, i, j, k]
                divu = ((q[1, ip1, j, k] - q[1, im1, j, k]) * r1 + (q[2, i, ja, k] - q[2, i, jb, k]) * r2
                        + (q[3, i, j, ka] - q[3, i, j, kb]) * r3)
                out[0, i, j, k] += v * divu
                d10 = (q[10, ip1, j, k] - q[10, im1, j, k]) * r1
                d11 = (q[10, i, ja, k] - q[10, i, jb, k]) * r2
                d12 = (q[10, i, j, ka] - q[10, i, j, kb]) * r3
                gp0 = (pv[ip1, j, k] - pv[im1, j, k]) * r1
                gp1 = (pv[i, ja, k] - pv[i, jb, k]) * r2
                gp2 = (pv[i, j, ka] - pv[i, j, kb]) * r3
                div0 = ((q[4, ip1, j, k] - q[4, im1, j, k]) * r1 + (q[7, i, ja, k] - q[7, i, jb, k]) * r2
                        + (q[8, i, j, ka] - q[8, i, j, kb]) * r3 + d10)
                div1 = ((q[7, ip1, j, k] - q[7, im1, j, k]) * r1 + (q[5, i, ja, k] - q[5, i, jb, k]) * r2
                        + (q[9, i, j, ka] - q[9, i, j, kb]) * r3 + d11)
                div2 = ((q[8, ip1, j, k] - q[8, im1, j, k]) * r1 + (q[9, i, ja, k] - q[9, i, jb, k]) * r2
                        + (q[6, i, j, ka] - q[6, i, j, kb]) * r3 + d12)
                out[1, i, j, k] += v * div0 - v * gp0
                out[2, i, j, k] += v * div1 - v * gp1
                out[3, i, j, k] += v * div2 - v * gp2


@njit(cache=True)
def _rhs_kernel_1d(q, pv, out, sigma, dx1, hyp):
    # N2 = N3 = 1: transverse differences vanish exactly, same arithmetic order
    nc, n1 = q.shape
    r1 = 0.5 / dx1
    h1 = hyp / dx1
    for c in range(nc):
        for i in range(n1):
            im1, im2 = max(i - 1, 0), max(i - 2, 0)
            ip1, ip2 = min(i + 1, n1 - 1), min(i + 2, n1 - 1)
            a1 = q[c, ip1]
            b1 = q[c, im1]
            d1 = (q[c, ip2] + q[c, im2]) - 4.0 * (a1 + b1) + 6.0 * q[c, i]
            g1 = (a1 - b1) * r1
            out[c, i] = (sigma * g1 - q[1, i] * g1) - h1 * d1
    for i in range(n1):
        im1, ip1 = max(i - 1, 0), min(i + 1, n1 - 1)
        v = q[0, i]
        out[0, i] += v * ((q[1, ip1] - q[1, im1]) * r1)
        div0 = (q[4, ip1] - q[4, im1]) * r1 + (q[10, ip1] - q[10, im1]) * r1
        out[1, i] += v * div0 - v * ((pv[ip1] - pv[im1]) * r1)
        out[2, i] += v * ((q[7, ip1] - q[7, im1]) * r1)
        out[3, i] += v * ((q[8, ip1] - q[8, im1]) * r1)


def _flat(a, lead):
    if not a.flags.c_contiguous:
        raise ValueError("kernel arrays must be C-contiguous")
    return a.reshape(lead, -1)


def nonstiff_rhs(q, pv, out, sigma, dx1, dx2, dx3, hyp):
    nc, n1, n2, n3 = q.shape
    if n2 == 1 and n3 == 1:
        _rhs_kernel_1d(_flat(q, nc), _flat(pv, 1)[0], _flat(out, nc), sigma, dx1, hyp)
        return
    _rhs_kernel(q, pv, out, sigma, dx1, dx2, dx3, hyp,
                _periodic(n2, 1), _periodic(n2, -1), _periodic(n2, 2), _periodic(n2, -2),
                _periodic(n3, 1), _periodic(n3, -1), _periodic(n3, 2), _periodic(n3, -2))


@njit(cache=True)
def _strain_1d(q, s, mu, lam, dx1):
    n1 = q.shape[1]
    r1 = 0.5 / dx1
    for i in range(n1):
        im1, ip1 = max(i - 1, 0), min(i + 1, n1 - 1)
        d00 = (q[1, ip1] - q[1, im1]) * r1
        d10 = (q[2, ip1] - q[2, im1]) * r1
        d20 = (q[3, ip1] - q[3, im1]) * r1
        third = (2.0 / 3.0) * d00
        s[0, i] = mu * (2.0 * d00 - third)
        s[1, i] = mu * (-third)
        s[2, i] = mu * (-third)
        s[3, i] = mu * d10
        s[4, i] = mu * d20
        s[5, i] = 0.0
        s[6, i] = lam * d00


def strain_source(q, s, mu, lam, dx1, dx2, dx3):
    nc, n1, n2, n3 = q.shape
    if n2 == 1 and n3 == 1:
        _strain_1d(_flat(q, nc), _flat(s, s.shape[0]), mu, lam, dx1)
        return
    _strain_kernel(q, s, mu, lam, dx1, dx2, dx3)


@njit(parallel=True, cache=True)
def _strain_kernel(q, s, mu, lam, dx1, dx2, dx3):
    _, n1, n2, n3 = q.shape
    r = (0.5 / dx1, 0.5 / dx2, 0.5 / dx3)
    for i in prange(n1):
        du = np.empty((3, 3))
        im1, ip1 = max(i - 1, 0), min(i + 1, n1 - 1)
        for j in range(n2):
            jm1, jp1 = (j - 1) % n2, (j + 1) % n2
            for k in range(n3):
                km1, kp1 = (k - 1) % n3, (k + 1) % n3
                for a in range(3):
                    du[a, 0] = (q[1 + a, ip1, j, k] - q[1 + a, im1, j, k]) * r[0]
                    du[a, 1] = (q[1 + a, i, jp1, k] - q[1 + a, i, jm1, k]) * r[1]
                    du[a, 2] = (q[1 + a, i, j, kp1] - q[1 + a, i, j, km1]) * r[2]
                divu = du[0, 0] + du[1, 1] + du[2, 2]
                third = (2.0 / 3.0) * divu
                s[0, i, j, k] = mu * (2.0 * du[0, 0] - third)
                s[1, i, j, k] = mu * (2.0 * du[1, 1] - third)
                s[2, i, j, k] = mu * (2.0 * du[2, 2] - third)
                s[3, i, j, k] = mu * (du[0, 1] + du[1, 0])
                s[4, i, j, k] = mu * (du[0, 2] + du[2, 0])
                s[5, i, j, k] = mu * (du[1, 2] + du[2, 1])
                s[6, i, j, k] = lam * divu


@njit(parallel=True, cache=True)
def _relax_par(q, s, tau, h):
    n = q.shape[1]
    for m in prange(n):
        e = math.exp(-h * q[0, m] / tau)
        for c in range(7):
            sc = s[c, m]
            q[4 + c, m] = sc + (q[4 + c, m] - sc) * e


@njit(cache=True)
def _relax_ser(q, s, tau, h):
    n = q.shape[1]
    for m in range(n):
        e = math.exp(-h * q[0, m] / tau)
        for c in range(7):
            sc = s[c, m]
            q[4 + c, m] = sc + (q[4 + c, m] - sc) * e


# below this many cells the parallel launch costs more than it saves
_PARALLEL_MIN_CELLS = 16384


def relax(q, s, tau, h):
    n = q[0].size
    fn = _relax_par if n >= _PARALLEL_MIN_CELLS else _relax_ser
    fn(_flat(q, q.shape[0]), _flat(s, s.shape[0]), tau, h)

"""Pure-numpy versions of the stencil kernels (fallback and cross-check)."""
import numpy as np

_SYM = ((4, 7, 8), (7, 5, 9), (8, 9, 6))


def _si(f, s):
    # value at i+s with clamped ghost cells
    n = f.shape[-3]
    idx = np.clip(np.arange(n) + s, 0, n - 1)
    return f[..., idx, :, :]


def _sj(f, s):
    return np.roll(f, -s, axis=-2)


def _sk(f, s):
    return np.roll(f, -s, axis=-1)


def _grad(f, dx1, dx2, dx3):
    return ((_si(f, 1) - _si(f, -1)) * (0.5 / dx1),
            (_sj(f, 1) - _sj(f, -1)) * (0.5 / dx2),
            (_sk(f, 1) - _sk(f, -1)) * (0.5 / dx3))


def nonstiff_rhs(q, pv, out, sigma, dx1, dx2, dx3, hyp):
    g1, g2, g3 = _grad(q, dx1, dx2, dx3)
    hy = -(hyp / dx1 * ((_si(q, 2) + _si(q, -2)) - 4.0 * (_si(q, 1) + _si(q, -1)) + 6.0 * q)
           + hyp / dx2 * ((_sj(q, 2) + _sj(q, -2)) - 4.0 * (_sj(q, 1) + _sj(q, -1)) + 6.0 * q)
           + hyp / dx3 * ((_sk(q, 2) + _sk(q, -2)) - 4.0 * (_sk(q, 1) + _sk(q, -1)) + 6.0 * q))
    gp = _grad(pv, dx1, dx2, dx3)
    v, u1, u2, u3 = q[0], q[1], q[2], q[3]
    adv = sigma * g1 - (u1 * g1 + u2 * g2 + u3 * g3)
    g = (g1, g2, g3)
    divu = g1[1] + g2[2] + g3[3]
    out[0] = adv[0] + v * divu + hy[0]
    for a in range(3):
        divpi = g1[_SYM[a][0]] + g2[_SYM[a][1]] + g3[_SYM[a][2]] + g[a][10]
        out[1 + a] = adv[1 + a] - v * gp[a] + v * divpi + hy[1 + a]
    out[4:] = adv[4:] + hy[4:]


def strain_source(q, s, mu, lam, dx1, dx2, dx3):
    g = _grad(q[1:4], dx1, dx2, dx3)  # g[b][a] = d_b u_a
    divu = g[0][0] + g[1][1] + g[2][2]
    third = (2.0 / 3.0) * divu
    s[0] = mu * (2.0 * g[0][0] - third)
    s[1] = mu * (2.0 * g[1][1] - third)
    s[2] = mu * (2.0 * g[2][2] - third)
    s[3] = mu * (g[1][0] + g[0][1])
    s[4] = mu * (g[2][0] + g[0][2])
    s[5] = mu * (g[2][1] + g[1][2])
    s[6] = lam * divu


def relax(q, s, tau, h):
    e = np.exp(-h * q[0] / tau)
    q[4:11] = s + (q[4:11] - s) * e

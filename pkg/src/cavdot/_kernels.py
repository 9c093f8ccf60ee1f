"""Numba kernels for the Lindblad right-hand side and RK4 stage algebra.

The density matrix is held as two separate real planes (re, im) so the inner
loops vectorize.  The generator is applied as left/right band operations:

    rhs(rho) = M rho + rho M^dag + sum_c A_c rho A_c^dag + dephasing part

where M = -i H(t)/hbar - (1/(2 hbar)) sum_c gamma_c A_c^dag A_c is stored as
a set of diagonals ("bands") at fixed flat-index offsets -- every coupling in
the model connects basis states at a fixed offset, so the band set is exact,
never an approximation.  Ladder collapse operators are two-sided shifted
diagonals; number-operator (dephasing) channels are a separable elementwise
term.  The dim^2 x dim^2 superoperator is never materialized.

For dim >= _TRI_MIN_DIM only the upper triangle of the (Hermitian) output is
computed and the lower triangle is mirrored.
"""

import numpy as np
from numba import njit, prange

_TILE = 512
_TRI_MIN_DIM = 512


@njit(fastmath=True, cache=True)
def _row_work(m, offs, wre, wim, lad_off, lad_u, deph_w, rr, ri, outr, outi,
              full, accr, acci):
    dim = rr.shape[0]
    n_off = offs.shape[0]
    n_lad = lad_off.shape[0]
    n_deph = deph_w.shape[0]
    rrow = rr[m]
    irow = ri[m]
    n0 = 0 if full else m
    for t0 in range(n0, dim, _TILE):
        t1 = min(dim, t0 + _TILE)
        for q in range(t1 - t0):
            accr[q] = 0.0
            acci[q] = 0.0
        # dephasing jump part: sum_k w_k[m] w_k[n] * rho[m, n]
        for k in range(n_deph):
            dm = deph_w[k, m]
            if dm != 0.0:
                dk = deph_w[k]
                for n in range(t0, t1):
                    w = dm * dk[n]
                    accr[n - t0] += w * rrow[n]
                    acci[n - t0] += w * irow[n]
        # (rho M^dag)[m, n] = sum_o conj(W[o, n]) * rho[m, n+o]
        for io in range(n_off):
            off = offs[io]
            lo = max(t0, -off)
            hi = min(t1, dim - off) if off > 0 else t1
            bre = wre[io]
            bim = wim[io]
            for n in range(lo, hi):
                ar = rrow[n + off]
                ai = irow[n + off]
                accr[n - t0] += bre[n] * ar + bim[n] * ai
                acci[n - t0] += bre[n] * ai - bim[n] * ar
        # (M rho)[m, n] = sum_o W[o, m] * rho[m+o, n]
        for io in range(n_off):
            off = offs[io]
            k = m + off
            if 0 <= k < dim:
                vr = wre[io, m]
                vi = wim[io, m]
                if vr != 0.0 or vi != 0.0:
                    sr = rr[k]
                    si = ri[k]
                    for n in range(t0, t1):
                        accr[n - t0] += vr * sr[n] - vi * si[n]
                        acci[n - t0] += vr * si[n] + vi * sr[n]
        # ladder jumps: u_c[m] u_c[n] * rho[m+off, n+off]
        for c in range(n_lad):
            off = lad_off[c]
            um = lad_u[c, m]
            if um != 0.0 and m + off < dim:
                sr = rr[m + off]
                si = ri[m + off]
                uu = lad_u[c]
                hi = min(t1, dim - off)
                for n in range(t0, hi):
                    s = um * uu[n]
                    accr[n - t0] += s * sr[n + off]
                    acci[n - t0] += s * si[n + off]
        for n in range(t0, t1):
            outr[m, n] = accr[n - t0]
            outi[m, n] = acci[n - t0]


@njit(parallel=True, fastmath=True, cache=True)
def rhs_kernel(offs, wre, wim, lad_off, lad_u, deph_w, rr, ri, outr, outi, full):
    dim = rr.shape[0]
    for m in prange(dim):
        accr = np.empty(_TILE)
        acci = np.empty(_TILE)
        _row_work(m, offs, wre, wim, lad_off, lad_u, deph_w, rr, ri,
                  outr, outi, full, accr, acci)


@njit(parallel=True, fastmath=True, cache=True)
def mirror_kernel(outr, outi):
    """Fill the strict lower triangle with the conjugate of the upper."""
    dim = outr.shape[0]
    blk = 128
    nb = (dim + blk - 1) // blk
    npairs = nb * (nb + 1) // 2
    for t in prange(npairs):
        bi = 0
        acc = 0
        while acc + (nb - bi) <= t:
            acc += nb - bi
            bi += 1
        bj = bi + (t - acc)
        i0 = bi * blk
        i1 = min(dim, i0 + blk)
        j0 = bj * blk
        j1 = min(dim, j0 + blk)
        for i in range(i0, i1):
            for j in range(max(j0, i + 1), j1):
                outr[j, i] = outr[i, j]
                outi[j, i] = -outi[i, j]


def apply_rhs(compiled, rr, ri, outr, outi, hermitian_input=True):
    """One RHS evaluation on re/im planes (bands already set for this time).

    The upper-triangle fast path maps Hermitian inputs to Hermitian outputs;
    general matrices take the full evaluation.
    """
    full = (not hermitian_input) or rr.shape[0] < _TRI_MIN_DIM
    rhs_kernel(compiled.offs, compiled.wre, compiled.wim,
               compiled.lad_off, compiled.lad_u, compiled.deph_w,
               rr, ri, outr, outi, full)
    if not full:
        mirror_kernel(outr, outi)


@njit(parallel=True, fastmath=True, cache=True)
def axpy_kernel(xr, xi, a, kr, ki, outr, outi):
    """out = x + a*k, elementwise on planes."""
    dim = xr.shape[0]
    for m in prange(dim):
        for n in range(dim):
            outr[m, n] = xr[m, n] + a * kr[m, n]
            outi[m, n] = xi[m, n] + a * ki[m, n]


@njit(parallel=True, fastmath=True, cache=True)
def rk4_combine_kernel(xr, xi, k1r, k1i, k2r, k2i, k3r, k3i, k4r, k4i, dt):
    """x += dt/6 (k1 + 2 k2 + 2 k3 + k4), in place."""
    dim = xr.shape[0]
    w = dt / 6.0
    for m in prange(dim):
        for n in range(dim):
            xr[m, n] += w * (k1r[m, n] + 2.0 * (k2r[m, n] + k3r[m, n]) + k4r[m, n])
            xi[m, n] += w * (k1i[m, n] + 2.0 * (k2i[m, n] + k3i[m, n]) + k4i[m, n])

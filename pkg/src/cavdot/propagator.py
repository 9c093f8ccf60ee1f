"""Fixed-step RK4 propagation of the Lindblad master equation.

The right-hand side

    d rho / dt = -(i/hbar) [H(t), rho]
                 + sum_c (gamma_c/hbar) (A_c rho A_c^dag - {A_c^dag A_c, rho}/2)

is evaluated as  M rho + rho M^dag + jump terms  with
M = -(i/hbar) H(t) - (1/(2 hbar)) sum_c gamma_c A_c^dag A_c, using the banded
kernels in :mod:`cavdot._kernels`.  The full superoperator matrix is never
formed.
"""

from __future__ import annotations

import math
import os
import sys
import time as _time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels, observables
from .constants import HBAR_EV_FS
from .errors import CapacityError, DomainError, NumericBlowupError
from .model import Model, envelope
from .tensor import DensityMatrix, QOperator

_REL_TOL = 1e-9


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integration settings (all times in fs)."""

    dt_fs: float = 0.02
    t_end_fs: float = 1000.0
    record_every_fs: float = 1.0
    renormalize_trace: bool = False
    max_memory_gb: float = 8.0

    def __post_init__(self):
        if self.dt_fs <= 0:
            raise DomainError("dt_fs must be > 0")
        if self.t_end_fs < 0:
            raise DomainError("t_end_fs must be >= 0")
        if self.t_end_fs > 0:
            if not (self.dt_fs <= self.record_every_fs <= self.t_end_fs):
                raise DomainError(
                    "need dt_fs <= record_every_fs <= t_end_fs "
                    f"(got {self.dt_fs}, {self.record_every_fs}, {self.t_end_fs})"
                )
        if self.max_memory_gb <= 0:
            raise DomainError("max_memory_gb must be > 0")

    def n_steps(self):
        if self.t_end_fs == 0:
            return 0
        n = round(self.t_end_fs / self.dt_fs)
        if abs(n * self.dt_fs - self.t_end_fs) > _REL_TOL * max(1.0, self.t_end_fs):
            raise DomainError("t_end_fs must be an integer multiple of dt_fs")
        return n

    def record_stride(self):
        if self.t_end_fs == 0:
            return 1
        s = round(self.record_every_fs / self.dt_fs)
        if abs(s * self.dt_fs - self.record_every_fs) > _REL_TOL * max(1.0, self.record_every_fs):
            raise DomainError("record_every_fs must be an integer multiple of dt_fs")
        return s


@dataclass
class Trajectory:
    """Time series of every recorded observable plus integrator diagnostics."""

    times: np.ndarray
    columns: dict
    layout_dims: tuple
    n_ph_levels: int
    final_state: object = None

    def __post_init__(self):
        if len(self.times) > 1 and not (np.diff(self.times) > 0).all():
            raise DomainError("trajectory times must be strictly increasing")
        for name, col in self.columns.items():
            if len(col) != len(self.times):
                raise DomainError(f"column {name} length differs from times")

    OBSERVABLE_COLUMNS = (
        "n_qd1", "n_qd2", "n_pl", "n_cav1", "n_cav2", "n_total",
        "C", "C_ph", "C_tot", "F2", "g2_11", "g2_22", "g2_12",
    )
    DIAGNOSTIC_COLUMNS = ("trace_err", "herm_err", "min_eig_qd")

    def __getitem__(self, name):
        if name == "t_fs":
            return self.times
        return self.columns[name]

    def __len__(self):
        return len(self.times)

    @property
    def max_trace_err(self):
        return float(self.columns["trace_err"].max()) if len(self.times) else 0.0

    @property
    def max_herm_err(self):
        return float(self.columns["herm_err"].max()) if len(self.times) else 0.0


def _classify_channels(channels, dim):
    """Split channels into ladder descriptors, diagonal vectors, and general ops."""
    lad_off, lad_u, deph_w, general = [], [], [], []
    for ch in channels:
        if ch.rate == 0.0:
            continue
        a = ch.operator.entries
        a = a.tocoo() if sp.issparse(a) else sp.coo_matrix(a)
        a.eliminate_zeros()
        scale = math.sqrt(ch.rate / HBAR_EV_FS)
        if a.nnz == 0:
            continue
        offsets = np.unique(a.col - a.row)
        values_real = np.abs(a.data.imag).max() == 0.0
        if values_real and len(offsets) == 1 and offsets[0] > 0:
            u = np.zeros(dim)
            u[a.row] = a.data.real * scale
            lad_off.append(int(offsets[0]))
            lad_u.append(u)
        elif values_real and len(offsets) == 1 and offsets[0] == 0:
            w = np.zeros(dim)
            w[a.row] = a.data.real * scale
            deph_w.append(w)
        else:
            general.append((ch.rate / HBAR_EV_FS, a.tocsr()))
    lad_off = np.asarray(lad_off if lad_off else [], dtype=np.int64)
    lad_u = np.asarray(lad_u if lad_u else np.zeros((0, dim)), dtype=float)
    if lad_u.size == 0:
        lad_u = np.zeros((0, dim))
    deph_w = np.asarray(deph_w if deph_w else np.zeros((0, dim)), dtype=float)
    if deph_w.size == 0:
        deph_w = np.zeros((0, dim))
    return lad_off, lad_u, deph_w, general


def _to_bands(mat, offs, dim):
    """Band array W with mat[m, m+offs[i]] = W[i, m]; entries off the band set must not exist."""
    coo = mat.tocoo()
    omap = {int(o): i for i, o in enumerate(offs)}
    w = np.zeros((len(offs), dim), dtype=complex)
    for r, c, v in zip(coo.row, coo.col, coo.data):
        w[omap[int(c - r)], r] += v
    return w


class CompiledGenerator:
    """Banded representation of the Lindblad generator for one model."""

    def __init__(self, model: Model):
        self.model = model
        dim = model.layout.total_dim
        self.dim = dim

        self.lad_off, self.lad_u, self.deph_w, self.general = _classify_channels(
            model.channels, dim)

        m0 = (-1j / HBAR_EV_FS) * sp.csr_matrix(model.h_static.entries, dtype=complex)
        for ch in model.channels:
            if ch.rate == 0.0:
                continue
            a = sp.csr_matrix(ch.operator.entries, dtype=complex)
            m0 = m0 - (ch.rate / (2.0 * HBAR_EV_FS)) * (a.getH() @ a)
        m_drive = (-1j / HBAR_EV_FS) * sp.csr_matrix(model.dipole.entries, dtype=complex)

        c0, c1 = m0.tocoo(), m_drive.tocoo()
        offs = np.unique(np.concatenate([c0.col - c0.row, c1.col - c1.row,
                                         np.zeros(1, dtype=np.int64)]))
        self.offs = offs.astype(np.int64)
        w0 = _to_bands(m0, self.offs, dim)
        w1 = _to_bands(m_drive, self.offs, dim)
        self.w0re = np.ascontiguousarray(w0.real)
        self.w0im = np.ascontiguousarray(w0.imag)
        self.w1re = np.ascontiguousarray(w1.real)
        self.w1im = np.ascontiguousarray(w1.imag)
        self.wre = self.w0re.copy()
        self.wim = self.w0im.copy()
        self._scale = 0.0
        self._drive_is_zero = not np.any(w1)

    def set_time(self, t):
        """Load the bands of M(t) = M0 + drive_scale(t) * (-i/hbar) Dipole."""
        lam = self.model.drive_scale(t)
        if self._drive_is_zero:
            lam = 0.0
        if lam != self._scale:
            np.multiply(self.w1re, lam, out=self.wre)
            self.wre += self.w0re
            np.multiply(self.w1im, lam, out=self.wim)
            self.wim += self.w0im
            self._scale = lam

    def apply(self, rr, ri, outr, outi, hermitian_input=True):
        _kernels.apply_rhs(self, rr, ri, outr, outi, hermitian_input=hermitian_input)
        if self.general:
            rho = rr + 1j * ri
            for rate_over_hbar, a in self.general:
                term = rate_over_hbar * (a @ rho @ a.getH().toarray())
                outr += term.real
                outi += term.imag


def compiled_generator(model):
    gen = getattr(model, "_compiled_generator", None)
    if gen is None:
        gen = CompiledGenerator(model)
        model._compiled_generator = gen
    return gen


def _as_matrix(rho):
    if isinstance(rho, DensityMatrix):
        return rho.matrix()
    if isinstance(rho, QOperator):
        return rho.toarray()
    return np.asarray(rho, dtype=complex)


def rhs(rho, t, model):
    """d rho/dt at time t as a dense complex matrix."""
    gen = compiled_generator(model)
    m = _as_matrix(rho)
    rr = np.ascontiguousarray(m.real)
    ri = np.ascontiguousarray(m.imag)
    outr = np.empty_like(rr)
    outi = np.empty_like(ri)
    gen.set_time(t)
    herm = bool(np.abs(m - m.conj().T).max() <= 1e-12)
    gen.apply(rr, ri, outr, outi, hermitian_input=herm)
    return outr + 1j * outi


class _Stepper:
    """RK4 stepping state: re/im planes of rho plus stage buffers."""

    def __init__(self, model, dim):
        self.gen = compiled_generator(model)
        shape = (dim, dim)
        self.rr = np.zeros(shape)
        self.ri = np.zeros(shape)
        self.k = [(np.empty(shape), np.empty(shape)) for _ in range(4)]
        self.tr = np.empty(shape)
        self.ti = np.empty(shape)

    def load(self, rho_matrix):
        np.copyto(self.rr, rho_matrix.real)
        np.copyto(self.ri, rho_matrix.imag)

    def state(self):
        return self.rr + 1j * self.ri

    def step(self, t, dt):
        gen = self.gen
        (k1r, k1i), (k2r, k2i), (k3r, k3i), (k4r, k4i) = self.k
        gen.set_time(t)
        gen.apply(self.rr, self.ri, k1r, k1i)
        _kernels.axpy_kernel(self.rr, self.ri, 0.5 * dt, k1r, k1i, self.tr, self.ti)
        gen.set_time(t + 0.5 * dt)
        gen.apply(self.tr, self.ti, k2r, k2i)
        _kernels.axpy_kernel(self.rr, self.ri, 0.5 * dt, k2r, k2i, self.tr, self.ti)
        gen.apply(self.tr, self.ti, k3r, k3i)
        _kernels.axpy_kernel(self.rr, self.ri, dt, k3r, k3i, self.tr, self.ti)
        gen.set_time(t + dt)
        gen.apply(self.tr, self.ti, k4r, k4i)
        _kernels.rk4_combine_kernel(self.rr, self.ri, k1r, k1i, k2r, k2i,
                                    k3r, k3i, k4r, k4i, dt)

    def renormalize(self):
        tr = np.trace(self.rr)
        if tr != 0.0:
            self.rr /= tr
            self.ri /= tr

    def trace(self):
        return float(np.trace(self.rr))


def rk4_step(rho, t, dt, model):
    """One classical RK4 step; raises NumericBlowupError on NaN/Inf."""
    if dt <= 0:
        raise DomainError("dt must be > 0")
    m = _as_matrix(rho)
    stepper = _Stepper(model, m.shape[0])
    stepper.load(m)
    stepper.step(t, dt)
    out = stepper.state()
    if not np.isfinite(stepper.rr).all() or not np.isfinite(stepper.ri).all():
        raise NumericBlowupError(
            f"NaN/Inf after RK4 step at t = {t:.6g} fs; retry with a smaller dt",
            t_fs=t,
        )
    return DensityMatrix(QOperator(model.layout, out), validate=False)


def estimate_memory_bytes(dim):
    # rho + 4 stage k's + stage tmp, two real planes each, plus slack for
    # sampling buffers and band data
    planes = 12
    return int(planes * dim * dim * 8 * 1.25)


def evolve(model, config, initial=None, sample_callback=None, state_callback=None,
           keep_final_state=False):
    """Propagate and record observables on the configured grid.

    ``sample_callback(t_fs, record, diag)`` fires at every recorded sample;
    ``state_callback(t_fs, rho_matrix)`` additionally hands over the full
    state (useful for validation; the matrix must not be mutated).
    """
    dim = model.layout.total_dim
    need = estimate_memory_bytes(dim)
    cap = config.max_memory_gb * 1024**3
    if need > cap:
        raise CapacityError(
            f"estimated {need/1024**3:.2f} GiB exceeds cap {config.max_memory_gb} GiB"
        )

    n_steps = config.n_steps()
    stride = config.record_stride()
    if initial is None:
        initial = DensityMatrix.ground_state(model.layout)
    rho0 = _as_matrix(initial)
    if rho0.shape != (dim, dim):
        raise DomainError(f"initial state dim {rho0.shape} != model dim {dim}")

    obs = observables.ObservableContext(model.layout)
    stepper = _Stepper(model, dim)
    stepper.load(rho0)

    times, rows = [], []

    def take_sample(step_index):
        t = step_index * config.dt_fs
        rho = stepper.state()
        tr = stepper.trace()
        # any valid density matrix has |rho_ij| <= 1; the trace alone cannot
        # flag divergence because the Lindblad flow conserves it exactly
        amax = max(np.abs(stepper.rr).max(), np.abs(stepper.ri).max())
        diverged = (not amax <= 2.0) or (not abs(tr - 1.0) <= 0.5)
        if diverged:
            raise NumericBlowupError(
                f"state diverged by t = {t:.6g} fs (step {step_index}, "
                f"trace = {tr!r}); retry with a smaller dt",
                t_fs=t, step=step_index,
            )
        rec = obs.record(rho)
        diag = obs.diagnostics(rho)
        times.append(t)
        rows.append((rec, diag))
        if sample_callback is not None:
            sample_callback(t, rec, diag)
        if state_callback is not None:
            state_callback(t, rho)

    progress = os.environ.get("CAVDOT_PROGRESS", "") == "1"
    t_start = _time.perf_counter()
    t_last = t_start
    take_sample(0)
    for step in range(n_steps):
        t = step * config.dt_fs
        stepper.step(t, config.dt_fs)
        if progress and (step + 1) % 2000 == 0:
            now = _time.perf_counter()
            tiny = 2.3e-308

            def _subn(a):
                aa = np.abs(a)
                return int(((aa > 0) & (aa < tiny)).sum())

            k1r, k1i = stepper.k[0]
            print(f"[evolve] step {step+1}/{n_steps} "
                  f"({2000/(now - t_last):.0f} steps/s, "
                  f"{(now - t_start)/60:.1f} min) "
                  f"subn rho={_subn(stepper.rr)+_subn(stepper.ri)} "
                  f"k1={_subn(k1r)+_subn(k1i)} "
                  f"tmp={_subn(stepper.tr)+_subn(stepper.ti)}",
                  file=sys.stderr, flush=True)
            t_last = now
        if config.renormalize_trace:
            stepper.renormalize()
        if (step + 1) % stride == 0:
            take_sample(step + 1)

    columns = {}
    for name in Trajectory.OBSERVABLE_COLUMNS:
        columns[name] = np.array([getattr(rec, _FIELD_OF[name]) for rec, _ in rows])
    for name in Trajectory.DIAGNOSTIC_COLUMNS:
        columns[name] = np.array([diag[name] for _, diag in rows])

    final_state = None
    if keep_final_state:
        final_state = DensityMatrix(QOperator(model.layout, stepper.state()),
                                    validate=False)
    return Trajectory(
        times=np.array(times),
        columns=columns,
        layout_dims=model.layout.dims,
        n_ph_levels=model.params.n_ph_levels,
        final_state=final_state,
    )


_FIELD_OF = {
    "n_qd1": "n_qd1", "n_qd2": "n_qd2", "n_pl": "n_pl",
    "n_cav1": "n_cav1", "n_cav2": "n_cav2", "n_total": "n_total",
    "C": "c", "C_ph": "c_ph", "C_tot": "c_tot", "F2": "f2",
    "g2_11": "g2_11", "g2_22": "g2_22", "g2_12": "g2_12",
}

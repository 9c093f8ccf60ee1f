"""Physical model assembly: parameters, Hamiltonians, Lindblad channels, pulses.

Conventions (fixed here, consumed everywhere else):

* Rotating frame at the drive carrier: mode detunings Delta = omega_mode -
  omega_drive enter the static Hamiltonian; the drive keeps the slowly
  varying envelope, H_d(t) = -E0(t) [sum_i d_i (sigma_i + h.c.) + d_s (b +
  h.c.)].  The full-envelope prefactor (rather than E0/2) is the convention
  that reproduces the reference dynamics; the fluence integral keeps the
  physical carrier average <cos^2> = 1/2 independently.
* The 20 fs FWHM of the built-in Gaussian pulse applies to the intensity
  envelope E0(t)^2, not the field.
* Pure dephasing of a subsystem uses its number operator as collapse
  operator with Lindblad rate 2*gamma_dephase, so an isolated two-level
  coherence decays as exp(-gamma_dephase * t / hbar).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import quad

from . import constants as const
from .errors import DomainError, InvalidDimensionError
from .tensor import (
    QOperator,
    SubsystemLayout,
    annihilation,
    embed,
)


@dataclass(frozen=True)
class SystemParams:
    """All physical constants of the two-dot/plasmon/two-cavity model (eV, Debye)."""

    omega_qd: tuple = (2.05, 2.05)
    omega_pl: float = 2.05
    omega_cav: tuple = (2.05, 2.05)
    g_s: tuple = (0.030, 0.0173)
    g: float = 0.001
    d_qd: tuple = (13.0, 13.0)
    d_pl: float = 4000.0
    gamma_qd_decay: tuple = (5e-8, 5e-8)
    gamma_qd_dephase: tuple = (8.6e-6, 8.6e-6)
    gamma_pl: float = 0.150
    gamma_cav_decay: tuple = (1e-4, 1e-4)
    gamma_cav_dephase: tuple = (8.6e-6, 8.6e-6)
    n_pl_levels: int = 24
    n_ph_levels: int = 4
    eps_med: float = 2.25

    def __post_init__(self):
        for name in ("omega_qd", "omega_cav", "g_s", "d_qd", "gamma_qd_decay",
                     "gamma_qd_dephase", "gamma_cav_decay", "gamma_cav_dephase"):
            v = tuple(float(x) for x in getattr(self, name))
            if len(v) != 2:
                raise InvalidDimensionError(f"{name} must have exactly two entries")
            object.__setattr__(self, name, v)
        rates = (self.g, self.gamma_pl, *self.g_s, *self.gamma_qd_decay,
                 *self.gamma_qd_dephase, *self.gamma_cav_decay, *self.gamma_cav_dephase)
        if any(r < 0 for r in rates):
            raise DomainError("rates and couplings must be >= 0")
        if self.n_pl_levels < 2 or self.n_ph_levels < 2:
            raise InvalidDimensionError("level counts must be >= 2")
        if self.eps_med < 1.0:
            raise DomainError("eps_med must be >= 1")

    def layout(self):
        return SubsystemLayout.standard(self.n_pl_levels, self.n_ph_levels)

    def g_s_avg(self):
        return 0.5 * (self.g_s[0] + self.g_s[1])


@dataclass(frozen=True)
class PulseSpec:
    """Driving-field envelope plus carrier frequency.

    shape 'gaussian' uses (e_max, fwhm_fs, t_peak_fs); 'flat_top' uses
    (e_max, t0_fs, t1_fs, delta_fs) per the tanh-edged envelope; 'off'
    disables the drive entirely.
    """

    shape: str = "gaussian"
    e_max: float = 2.5e6
    fwhm_fs: float = 20.0
    t_peak_fs: float = 36.3
    t0_fs: float = 0.0
    t1_fs: float = 0.0
    delta_fs: float = 10.0
    omega_drive: float = 2.05

    def __post_init__(self):
        if self.shape not in ("gaussian", "flat_top", "off"):
            raise DomainError(f"unknown pulse shape {self.shape!r}")
        if self.e_max < 0:
            raise DomainError("e_max must be >= 0")
        if self.shape == "gaussian" and self.fwhm_fs <= 0:
            raise DomainError("gaussian pulse needs fwhm_fs > 0")
        if self.shape == "flat_top":
            if not self.t1_fs > self.t0_fs:
                raise DomainError("flat_top needs t1_fs > t0_fs")
            if self.delta_fs <= 0:
                raise DomainError("flat_top needs delta_fs > 0")


@dataclass
class LindbladChannel:
    """Collapse operator A with its rate (eV): gamma/hbar (A rho A^dag - {A^dag A, rho}/2)."""

    operator: QOperator
    rate: float
    label: str = ""

    def __post_init__(self):
        if self.rate < 0:
            raise DomainError("channel rate must be >= 0")


def envelope(pulse, t):
    """Drive envelope E0(t) in V/m.  Accepts scalar or array t."""
    t = np.asarray(t, dtype=float)
    if pulse.shape == "off":
        out = np.zeros_like(t)
    elif pulse.shape == "gaussian":
        sigma_field = pulse.fwhm_fs / (2.0 * math.sqrt(math.log(2.0)))
        out = pulse.e_max * np.exp(-((t - pulse.t_peak_fs) ** 2) / (2.0 * sigma_field**2))
    else:
        out = pulse.e_max * _flat_top_shape(pulse, t)
    return out if out.ndim else float(out)


def _flat_top_shape(pulse, t):
    # (tanh(x) + 1)^-1 == (1 + exp(-2x)) / 2, which is numerically stable on
    # the pulse plateau and decays cleanly far outside it.
    def inv_tanh_term(x):
        return 0.5 * (1.0 + np.exp(np.clip(-2.0 * x, -745.0, 709.0)))

    t0, t1, d = pulse.t0_fs, pulse.t1_fs, pulse.delta_fs
    tc = 0.5 * (t0 + t1)
    num = inv_tanh_term((tc - t0) / d) + inv_tanh_term((t1 - tc) / d)
    den = inv_tanh_term((t - t0) / d) + inv_tanh_term((t1 - t) / d)
    return num / den


def pulse_on_window(pulse):
    """(t_start, t_end) of the nominal pulse-on window, or None when off."""
    if pulse.shape == "off":
        return None
    if pulse.shape == "gaussian":
        return (pulse.t_peak_fs - pulse.fwhm_fs, pulse.t_peak_fs + pulse.fwhm_fs)
    return (pulse.t0_fs - pulse.delta_fs, pulse.t1_fs + pulse.delta_fs)


def fluence(pulse, eps_med):
    """Pulse fluence in nJ/cm^2: (1/2) sqrt(eps) c eps0 * integral E0(t)^2 dt."""
    if pulse.shape == "off":
        return 0.0
    if pulse.shape == "gaussian":
        sigma = pulse.fwhm_fs / (2.0 * math.sqrt(math.log(2.0)))
        lo, hi = pulse.t_peak_fs - 30 * sigma, pulse.t_peak_fs + 30 * sigma
    else:
        lo = pulse.t0_fs - 50 * pulse.delta_fs
        hi = pulse.t1_fs + 50 * pulse.delta_fs
    val, _ = quad(lambda t: envelope(pulse, t) ** 2, lo, hi,
                  epsrel=1e-9, epsabs=0.0, limit=400)
    f_si = 0.5 * math.sqrt(eps_med) * const.C_M_PER_S * const.EPS0_F_PER_M * val * const.FS_TO_S
    return f_si * const.J_PER_M2_TO_NJ_PER_CM2


def purcell_rate(g_s_avg, gamma_pl):
    """Plasmon-induced QD decay rate 4 g_s^2 / gamma_s (eV)."""
    if gamma_pl <= 0:
        raise DomainError("purcell_rate needs gamma_pl > 0")
    return 4.0 * g_s_avg**2 / gamma_pl


def effective_xi(g, g_s_avg, gamma_pl):
    """Dimensionless QD-cavity coupling strength g*gamma_s/g_s^2."""
    if g_s_avg <= 0:
        raise DomainError("effective_xi needs g_s_avg > 0")
    return g * gamma_pl / g_s_avg**2


def coupling_asymmetry(g_s):
    """Delta g_s = g_s^1 - g_s^2."""
    return g_s[0] - g_s[1]


class Model:
    """Assembled model: layout, site operators, static Hamiltonian, channels, drive.

    The rotating frame is set by ``pulse.omega_drive``.
    """

    def __init__(self, params, pulse):
        self.params = params
        self.pulse = pulse
        self.layout = params.layout()
        lay = self.layout
        npl, nph = params.n_pl_levels, params.n_ph_levels
        self.sigma = (
            embed(annihilation(2), "qd1", lay),
            embed(annihilation(2), "qd2", lay),
        )
        self.b = embed(annihilation(npl), "plasmon", lay)
        self.c = (
            embed(annihilation(nph), "cav1", lay),
            embed(annihilation(nph), "cav2", lay),
        )
        self.h_static = hamiltonian_static(params, pulse.omega_drive, ops=self._ops())
        self.dipole = dipole_operator(params, ops=self._ops())
        self.channels = build_channels(params, ops=self._ops())

    def _ops(self):
        return {
            "layout": self.layout,
            "sigma": self.sigma,
            "b": self.b,
            "c": self.c,
        }

    def hamiltonian(self, t):
        """H(t) = H_static + H_drive(t) as a sparse QOperator."""
        return QOperator(self.layout,
                         self.h_static.entries + self.drive_scale(t) * self.dipole.entries)

    def drive_scale(self, t):
        """Scalar multiplying the dipole operator at time t."""
        return -envelope(self.pulse, t)


def _default_ops(params):
    lay = params.layout()
    return {
        "layout": lay,
        "sigma": (embed(annihilation(2), "qd1", lay), embed(annihilation(2), "qd2", lay)),
        "b": embed(annihilation(params.n_pl_levels), "plasmon", lay),
        "c": (
            embed(annihilation(params.n_ph_levels), "cav1", lay),
            embed(annihilation(params.n_ph_levels), "cav2", lay),
        ),
    }


def hamiltonian_static(params, omega_drive, ops=None):
    """Rotating-frame static Hamiltonian (detunings + couplings), Hermitian, eV."""
    ops = ops or _default_ops(params)
    lay, sig, b, c = ops["layout"], ops["sigma"], ops["b"], ops["c"]
    h = None

    def acc(term):
        nonlocal h
        h = term if h is None else QOperator(lay, h.entries + term.entries)

    for i in range(2):
        delta = params.omega_qd[i] - omega_drive
        if delta != 0.0:
            acc(QOperator(lay, delta * (sig[i].dagger().entries @ sig[i].entries)))
        delta_c = params.omega_cav[i] - omega_drive
        if delta_c != 0.0:
            acc(QOperator(lay, delta_c * (c[i].dagger().entries @ c[i].entries)))
        acc(QOperator(lay, (-params.g_s[i]) * (
            sig[i].dagger().entries @ b.entries + sig[i].entries @ b.dagger().entries)))
        acc(QOperator(lay, (-params.g) * (
            sig[i].dagger().entries @ c[i].entries + sig[i].entries @ c[i].dagger().entries)))
    delta_s = params.omega_pl - omega_drive
    if delta_s != 0.0:
        acc(QOperator(lay, delta_s * (b.dagger().entries @ b.entries)))
    if h is None:
        import scipy.sparse as sp
        h = QOperator(lay, sp.csr_matrix((lay.total_dim, lay.total_dim), dtype=complex))
    return h


def dipole_operator(params, ops=None):
    """Sum_i d_i (sigma_i + sigma_i^dag) + d_s (b + b^dag), in Debye units."""
    ops = ops or _default_ops(params)
    lay, sig, b = ops["layout"], ops["sigma"], ops["b"]
    ent = params.d_pl * (b.entries + b.dagger().entries)
    for i in range(2):
        ent = ent + params.d_qd[i] * (sig[i].entries + sig[i].dagger().entries)
    # Debye * V/m -> eV
    return QOperator(lay, ent * const.DIPOLE_FIELD_TO_EV)


def hamiltonian_drive(params, pulse, t, ops=None):
    """Rotating-frame drive -E0(t) [sum_i d_i (sigma_i + h.c.) + d_s (b + h.c.)], eV."""
    if not np.isfinite(t):
        raise DomainError("time must be finite")
    dip = dipole_operator(params, ops=ops)
    return QOperator(dip.layout, (-envelope(pulse, t)) * dip.entries)


def build_channels(params, ops=None):
    """Lindblad channels: decay (lowering ops) + pure dephasing (number ops, 2*gamma)."""
    ops = ops or _default_ops(params)
    lay, sig, b, c = ops["layout"], ops["sigma"], ops["b"], ops["c"]
    channels = []

    def add(op, rate, label):
        if rate > 0.0:
            channels.append(LindbladChannel(op, rate, label))

    for i in range(2):
        add(sig[i], params.gamma_qd_decay[i], f"qd{i+1}_decay")
    add(b, params.gamma_pl, "plasmon_decay")
    for i in range(2):
        add(c[i], params.gamma_cav_decay[i], f"cav{i+1}_decay")
    for i in range(2):
        n_op = QOperator(lay, sig[i].dagger().entries @ sig[i].entries)
        add(n_op, 2.0 * params.gamma_qd_dephase[i], f"qd{i+1}_dephase")
    for i in range(2):
        n_op = QOperator(lay, c[i].dagger().entries @ c[i].entries)
        add(n_op, 2.0 * params.gamma_cav_dephase[i], f"cav{i+1}_dephase")
    return channels

"""Recorded quantities: populations, photon pair correlations, concurrence,
Bell fidelity, partial traces and oscillation diagnostics.

Undefined values are reported as NaN: g2 entries whose population product
falls below ``EPS_POP``, and C_ph/C_tot whenever the layout does not have
two-level cavities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import DomainError, InvalidDimensionError, UnsupportedLayoutError
from .tensor import DensityMatrix, QOperator, SubsystemLayout

# population floor below which g2 normalization is meaningless
EPS_POP = 1e-6

# default peak prominence as a fraction of the series range
PEAK_PROMINENCE_FRACTION = 0.05

_IMAG_TOL = 1e-10

PSI_MINUS = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)


@dataclass(frozen=True)
class ObservableRecord:
    """All observables of one state snapshot."""

    n_qd1: float
    n_qd2: float
    n_pl: float
    n_cav1: float
    n_cav2: float
    n_total: float
    g2_11: float
    g2_22: float
    g2_12: float
    c: float
    c_ph: float
    c_tot: float
    f2: float

    @property
    def f(self):
        return math.sqrt(self.f2)


@dataclass(frozen=True)
class OscillationReport:
    """Peaks, mean period and modulation depth of one time series."""

    peak_times: tuple
    peak_values: tuple
    mean_period: float
    modulation_k: float


def _multi_index(dims):
    return np.array(np.unravel_index(np.arange(int(np.prod(dims))), dims))


class ObservableContext:
    """Precomputed diagonals and reductions for one layout."""

    def __init__(self, layout: SubsystemLayout):
        self.layout = layout
        dims = layout.dims
        comp = _multi_index(dims).astype(float)
        self.number_diag = {site: comp[i] for i, site in enumerate(layout.sites)}
        self._have_cavities = ("cav1" in layout.sites) and ("cav2" in layout.sites)
        if self._have_cavities:
            n1 = self.number_diag["cav1"]
            n2 = self.number_diag["cav2"]
            self.g2_num_diag = {
                (1, 1): n1 * (n1 - 1.0),
                (2, 2): n2 * (n2 - 1.0),
                (1, 2): n1 * n2,
            }
        self._qd_pair = ("qd1" in layout.sites) and ("qd2" in layout.sites)
        self.n_ph = dims[layout.site_index("cav1")] if self._have_cavities else None

    def populations(self, rho_matrix):
        d = rho_matrix.diagonal().real
        return {site: float(vec @ d) for site, vec in self.number_diag.items()}

    def record(self, rho_matrix):
        d = rho_matrix.diagonal()
        if abs(d.imag).max(initial=0.0) > _IMAG_TOL:
            raise DomainError("state diagonal has a non-negligible imaginary part")
        dr = d.real
        pops = {site: float(vec @ dr) for site, vec in self.number_diag.items()}
        n_total = float(sum(pops.values()))

        g2 = {}
        for (i, j), num_diag in self.g2_num_diag.items():
            ni = pops["cav1"] if i == 1 else pops["cav2"]
            nj = pops["cav1"] if j == 1 else pops["cav2"]
            denom = ni * nj
            if denom < EPS_POP:
                g2[(i, j)] = float("nan")
            else:
                g2[(i, j)] = float(num_diag @ dr) / denom

        dm = DensityMatrix(QOperator(self.layout, rho_matrix), validate=False)
        rho_qd = partial_trace(dm, ("qd1", "qd2"))
        c = concurrence(rho_qd)
        rho_ph_full = partial_trace(dm, ("cav1", "cav2"))
        f2 = _bell_fidelity_sq_photon(rho_ph_full.matrix(), self.n_ph)
        if self.n_ph == 2:
            c_ph = concurrence(rho_ph_full)
            c_tot = c + c_ph
        else:
            c_ph = float("nan")
            c_tot = float("nan")

        return ObservableRecord(
            n_qd1=pops["qd1"], n_qd2=pops["qd2"], n_pl=pops["plasmon"],
            n_cav1=pops["cav1"], n_cav2=pops["cav2"], n_total=n_total,
            g2_11=g2[(1, 1)], g2_22=g2[(2, 2)], g2_12=g2[(1, 2)],
            c=c, c_ph=c_ph, c_tot=c_tot, f2=f2,
        )

    def diagnostics(self, rho_matrix):
        tr = np.trace(rho_matrix)
        herm = float(np.abs(rho_matrix - rho_matrix.conj().T).max())
        dm = DensityMatrix(QOperator(self.layout, rho_matrix), validate=False)
        rho_qd = partial_trace(dm, ("qd1", "qd2")).matrix()
        min_eig = float(np.linalg.eigvalsh(rho_qd).min())
        return {
            "trace_err": float(abs(tr - 1.0)),
            "herm_err": herm,
            "min_eig_qd": min_eig,
        }


def population(rho, mode):
    """Tr(n_mode rho) for mode in the state's layout."""
    dm = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho, validate=False)
    lay = dm.layout
    i = lay.site_index(mode)
    comp = _multi_index(lay.dims)[i].astype(float)
    d = dm.matrix().diagonal()
    if abs(d.imag).max(initial=0.0) > _IMAG_TOL:
        raise DomainError("population: diagonal has imaginary part above tolerance")
    return float(comp @ d.real)


def g2_same_time(rho, i, j, eps_pop=EPS_POP):
    """Normalized same-time pair correlation of cavities i, j in {1, 2}.

    Returns NaN (the undefined-value flag) when n_i * n_j < eps_pop.
    """
    if i not in (1, 2) or j not in (1, 2):
        raise DomainError("cavity indices must be 1 or 2")
    dm = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho, validate=False)
    lay = dm.layout
    comp = _multi_index(lay.dims).astype(float)
    ni_diag = comp[lay.site_index(f"cav{i}")]
    nj_diag = comp[lay.site_index(f"cav{j}")]
    num_diag = ni_diag * (ni_diag - 1.0) if i == j else ni_diag * nj_diag
    d = dm.matrix().diagonal().real
    denom = float(ni_diag @ d) * float(nj_diag @ d)
    if denom < eps_pop:
        return float("nan")
    return float(num_diag @ d) / denom


def partial_trace(rho, keep):
    """Reduced state on the kept subsystems (names or indices), layout order."""
    dm = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho, validate=False)
    lay = dm.layout
    if isinstance(keep, (str, int)):
        keep = (keep,)
    keep_idx = sorted({lay.site_index(k) for k in keep})
    if not keep_idx:
        raise DomainError("keep set must be non-empty")
    n_sites = len(lay.dims)
    tensor = dm.matrix().reshape(lay.dims + lay.dims)
    # trace out the complement, highest axis first so indices stay valid
    for axis in sorted(set(range(n_sites)) - set(keep_idx), reverse=True):
        k = tensor.ndim // 2
        tensor = np.trace(tensor, axis1=axis, axis2=axis + k)
        # np.trace moves the traced axes to the end; reorder back
        # np.trace output: remaining axes in order with traced removed -> already fine
    red_lay = lay.reduced(keep_idx)
    n = red_lay.total_dim
    return DensityMatrix(QOperator(red_lay, tensor.reshape(n, n)), validate=False)


_SY_SY = np.array([
    [0, 0, 0, -1],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [-1, 0, 0, 0],
], dtype=complex)


def concurrence(rho_2qubit):
    """Wootters concurrence of a two-qubit density matrix, clamped to [0, 1]."""
    m = rho_2qubit.matrix() if isinstance(rho_2qubit, DensityMatrix) else np.asarray(rho_2qubit)
    if m.shape != (4, 4):
        raise DomainError(f"concurrence needs a 4x4 matrix, got {m.shape}")
    if np.abs(m - m.conj().T).max() > 1e-8:
        raise DomainError("concurrence input not Hermitian")
    if abs(np.trace(m) - 1.0) > 1e-6:
        raise DomainError("concurrence input trace differs from 1")
    rho_tilde = _SY_SY @ m.conj() @ _SY_SY
    # Hermitian form: eigenvalues of sqrt(rho) rho_tilde sqrt(rho) match those
    # of rho*rho_tilde but come from a Hermitian solve (accurate to ~1e-15,
    # where eigvals() of the non-normal product is good to ~1e-8 only)
    w, v = np.linalg.eigh(m)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    herm = sqrt_rho @ rho_tilde @ sqrt_rho
    lam_sq = np.linalg.eigvalsh(herm)
    # zero out eigensolver floor noise; sqrt would amplify ~1e-17 to ~3e-9
    tol = 64.0 * np.finfo(float).eps * max(float(lam_sq.max()), 0.0)
    lam_sq = np.where(lam_sq > tol, lam_sq, 0.0)
    lam = np.sqrt(lam_sq)
    c = lam[3] - lam[2] - lam[1] - lam[0]
    return float(min(max(c, 0.0), 1.0))


def bell_fidelity_sq(rho_2qubit):
    """F^2 = <Psi-|rho|Psi-> for a two-qubit state."""
    m = rho_2qubit.matrix() if isinstance(rho_2qubit, DensityMatrix) else np.asarray(rho_2qubit)
    if m.shape != (4, 4):
        raise DomainError(f"bell_fidelity_sq needs a 4x4 matrix, got {m.shape}")
    val = PSI_MINUS @ m @ PSI_MINUS
    if abs(val.imag) > _IMAG_TOL:
        raise DomainError("fidelity has imaginary part above tolerance")
    return float(val.real)


def _bell_fidelity_sq_photon(rho_ph, n_ph):
    """<Psi-|rho_ph|Psi-> with Psi- on the (0, 1) levels of the two cavities."""
    psi = np.zeros(n_ph * n_ph)
    psi[0 * n_ph + 1] = 1.0 / math.sqrt(2.0)
    psi[1 * n_ph + 0] = -1.0 / math.sqrt(2.0)
    val = psi @ rho_ph @ psi
    return float(val.real)


def photon_qubit_reduce(rho_full):
    """Two-cavity reduced state when the cavities are two-level (N_ph = 2)."""
    dm = rho_full if isinstance(rho_full, DensityMatrix) else DensityMatrix(rho_full, validate=False)
    lay = dm.layout
    try:
        i1 = lay.site_index("cav1")
        i2 = lay.site_index("cav2")
    except InvalidDimensionError:
        raise UnsupportedLayoutError("layout has no cavity pair")
    if lay.dims[i1] != 2 or lay.dims[i2] != 2:
        raise UnsupportedLayoutError(
            f"photon concurrence needs N_ph = 2, layout has {lay.dims[i1]}"
        )
    return partial_trace(dm, ("cav1", "cav2"))


def analyze_oscillations(times, values, prominence=None):
    """Local maxima, mean peak spacing and modulation depth of a series.

    NaN entries (undefined samples) are ignored.  ``prominence`` defaults to
    5% of the series range.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape:
        raise DomainError("times and values must have equal length")
    if len(t) < 3:
        raise DomainError("need at least 3 samples")
    ok = np.isfinite(v)
    t, v = t[ok], v[ok]
    if len(t) < 3:
        return OscillationReport((), (), float("nan"), 0.0)
    vmax, vmin = float(v.max()), float(v.min())
    rng = vmax - vmin
    if prominence is None:
        prominence = PEAK_PROMINENCE_FRACTION * rng if rng > 0 else None
    if rng == 0.0:
        return OscillationReport((), (), float("nan"), 0.0)
    idx, _ = find_peaks(v, prominence=prominence)
    peak_t = tuple(float(x) for x in t[idx])
    peak_v = tuple(float(x) for x in v[idx])
    if len(peak_t) >= 2:
        period = float(np.diff(peak_t).mean())
    else:
        period = float("nan")
    denom = vmax + vmin
    k = (vmax - vmin) / denom if denom != 0.0 else 0.0
    return OscillationReport(peak_t, peak_v, period, float(k))

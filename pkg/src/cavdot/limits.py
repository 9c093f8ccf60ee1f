"""Closed-form results for the two-level-cavity restricted photon family and
the late-time concurrence decay estimate; used as an oracle layer against the
numeric observables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .tensor import DensityMatrix, QOperator, SubsystemLayout


@dataclass(frozen=True)
class RestrictedFamilyParams:
    """Mixing amplitudes of A (x |11> + y |00> + Psi-)."""

    x: float
    y: float

    @property
    def norm(self):
        return 1.0 / math.sqrt(1.0 + self.x**2 + self.y**2)


def restricted_state(params):
    """Pure two-cavity state of the restricted family, basis {00, 01, 10, 11}."""
    if not (np.isfinite(params.x) and np.isfinite(params.y)):
        raise DomainError("x and y must be finite")
    a = params.norm
    ket = a * np.array([
        params.y,
        1.0 / math.sqrt(2.0),
        -1.0 / math.sqrt(2.0),
        params.x,
    ])
    lay = SubsystemLayout(dims=(2, 2), sites=("cav1", "cav2"))
    return DensityMatrix(QOperator(lay, np.outer(ket, ket.conj())), validate=False)


def g12_from_cph(c_ph):
    """g2_12 = (1 - C_ph) / (1 - C_ph/2)^2, the small-y relation."""
    if not 0.0 <= c_ph <= 1.0:
        raise DomainError(f"C_ph must be in [0, 1], got {c_ph}")
    return (1.0 - c_ph) / (1.0 - 0.5 * c_ph) ** 2


def g12_small_x(x, c_ph):
    """g2_12 = 4 x^2 / C_ph, the small-x relation."""
    if c_ph <= 0.0:
        raise DomainError("C_ph must be > 0")
    return 4.0 * x**2 / c_ph


def unnormalized_g12(c_ph):
    """G2_12 = 1 - C_ph (exact on the y = 0 family)."""
    if not 0.0 <= c_ph <= 1.0:
        raise DomainError(f"C_ph must be in [0, 1], got {c_ph}")
    return 1.0 - c_ph


@dataclass(frozen=True)
class DecayEstimateInputs:
    """Time-averaged occupations and decay rates entering the gamma estimate."""

    n_bar_qd: float
    n_bar_cav: float
    gamma_qd: float
    gamma_cav: float

    def __post_init__(self):
        if self.n_bar_qd < 0 or self.n_bar_cav < 0:
            raise DomainError("occupations must be >= 0")
        if self.n_bar_qd + self.n_bar_cav <= 0:
            raise DomainError("total occupation must be > 0")

    @property
    def alpha_qd(self):
        return self.n_bar_qd / (self.n_bar_qd + self.n_bar_cav)

    @property
    def alpha_cav(self):
        return self.n_bar_cav / (self.n_bar_qd + self.n_bar_cav)


def concurrence_decay_rate(inputs):
    """gamma = alpha_QD * gamma_QD + alpha_C * gamma_C (eV)."""
    return inputs.alpha_qd * inputs.gamma_qd + inputs.alpha_cav * inputs.gamma_cav

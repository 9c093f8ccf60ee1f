"""Operator algebra on tensor-product Hilbert spaces.

The composite space is an ordered tensor product of small subsystems.  The
canonical order used everywhere in this package is

    [qd1, qd2, plasmon, cav1, cav2]

(`SubsystemLayout.standard`).  Reduced layouts produced by partial traces
keep the canonical ordering of whichever sites survive.

Operators built once per run may be stored sparse (scipy CSR); the density
matrix itself is dense.  All operations accept either storage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, InvalidDimensionError

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-8

STANDARD_SITES = ("qd1", "qd2", "plasmon", "cav1", "cav2")


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered list of subsystem dimensions with site names."""

    dims: tuple
    sites: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        sites = tuple(self.sites)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "sites", sites)
        if len(dims) != len(sites):
            raise InvalidDimensionError("dims and sites must have equal length")
        if len(set(sites)) != len(sites):
            raise InvalidDimensionError(f"duplicate site names: {sites}")
        if any(d < 2 for d in dims):
            raise InvalidDimensionError(f"every subsystem needs >= 2 levels, got {dims}")

    @classmethod
    def standard(cls, n_pl_levels, n_ph_levels):
        """The canonical five-subsystem layout [qd1, qd2, plasmon, cav1, cav2]."""
        return cls(dims=(2, 2, n_pl_levels, n_ph_levels, n_ph_levels), sites=STANDARD_SITES)

    @property
    def total_dim(self):
        return int(np.prod(self.dims))

    def site_index(self, site):
        if isinstance(site, str):
            try:
                return self.sites.index(site)
            except ValueError:
                raise InvalidDimensionError(f"no site named {site!r} in layout {self.sites}")
        i = int(site)
        if not 0 <= i < len(self.dims):
            raise InvalidDimensionError(f"site index {i} out of range for {len(self.dims)} sites")
        return i

    def reduced(self, keep_indices):
        keep = sorted(keep_indices)
        return SubsystemLayout(
            dims=tuple(self.dims[i] for i in keep),
            sites=tuple(self.sites[i] for i in keep),
        )


def single_site_layout(n_levels, site="mode"):
    return SubsystemLayout(dims=(n_levels,), sites=(site,))


@dataclass
class QOperator:
    """Complex matrix on a composite Hilbert space with layout metadata."""

    layout: SubsystemLayout
    entries: object  # np.ndarray or scipy sparse matrix

    def __post_init__(self):
        n = self.layout.total_dim
        shape = self.entries.shape
        if shape != (n, n):
            raise InvalidDimensionError(
                f"operator shape {shape} does not match layout dim {n}"
            )

    @property
    def dim(self):
        return self.layout.total_dim

    @property
    def is_sparse(self):
        return sp.issparse(self.entries)

    def toarray(self):
        if self.is_sparse:
            return self.entries.toarray()
        return np.asarray(self.entries)

    def dagger(self):
        return adjoint(self)

    def __matmul__(self, other):
        return multiply(self, other)

    def __add__(self, other):
        return add_scaled(self, 1.0, other)

    def __sub__(self, other):
        return add_scaled(self, -1.0, other)

    def __mul__(self, scalar):
        return QOperator(self.layout, self.entries * scalar)

    __rmul__ = __mul__

    def hermiticity_defect(self):
        a = self.toarray()
        return float(np.abs(a - a.conj().T).max())


def annihilation(n_levels, site="mode"):
    """Single-subsystem lowering operator: (m, m+1) entry is sqrt(m+1)."""
    n_levels = int(n_levels)
    if n_levels < 2:
        raise InvalidDimensionError(f"annihilation needs >= 2 levels, got {n_levels}")
    mat = sp.diags(np.sqrt(np.arange(1, n_levels, dtype=float)), 1, format="csr", dtype=complex)
    return QOperator(single_site_layout(n_levels, site), mat)


def number_op(n_levels, site="mode"):
    mat = sp.diags(np.arange(n_levels, dtype=float).astype(complex), format="csr")
    return QOperator(single_site_layout(n_levels, site), mat)


def identity(layout):
    return QOperator(layout, sp.identity(layout.total_dim, format="csr", dtype=complex))


def embed(op, site, layout):
    """I (x) ... (x) op (x) ... (x) I at the given site of `layout`."""
    i = layout.site_index(site)
    d = op.layout.total_dim
    if d != layout.dims[i]:
        raise InvalidDimensionError(
            f"operator dim {d} does not match layout.dims[{i}] = {layout.dims[i]}"
        )
    left = int(np.prod(layout.dims[:i], dtype=np.int64)) if i > 0 else 1
    right = int(np.prod(layout.dims[i + 1:], dtype=np.int64)) if i + 1 < len(layout.dims) else 1
    core = op.entries if sp.issparse(op.entries) else sp.csr_matrix(op.entries)
    mat = sp.kron(sp.identity(left, dtype=complex), core, format="csr")
    mat = sp.kron(mat, sp.identity(right, dtype=complex), format="csr")
    return QOperator(layout, mat)


def _unwrap(x):
    return x.entries if isinstance(x, QOperator) else x


def _check_same_layout(a, b):
    if a.layout.dims != b.layout.dims:
        raise InvalidDimensionError(
            f"layout mismatch: {a.layout.dims} vs {b.layout.dims}"
        )


def adjoint(op):
    e = _unwrap(op)
    if sp.issparse(e):
        return QOperator(op.layout, e.conj().T.tocsr())
    return QOperator(op.layout, np.ascontiguousarray(e.conj().T))


def multiply(a, b):
    _check_same_layout(a, b)
    return QOperator(a.layout, _unwrap(a) @ _unwrap(b))


def add_scaled(a, alpha, b):
    """a + alpha*b."""
    _check_same_layout(a, b)
    return QOperator(a.layout, _unwrap(a) + alpha * _unwrap(b))


def trace(op):
    e = _unwrap(op)
    if sp.issparse(e):
        return complex(e.diagonal().sum())
    return complex(np.trace(e))


def hermitian_eigenvalues(op, tol=HERMITICITY_TOL):
    """Real eigenvalues of a Hermitian operator, descending."""
    a = op.toarray() if isinstance(op, QOperator) else np.asarray(op)
    defect = np.abs(a - a.conj().T).max()
    if defect > tol:
        raise DomainError(f"operator is not Hermitian: max |A - A^dag| = {defect:.3e}")
    vals = np.linalg.eigvalsh(a)
    return vals[::-1].copy()


@dataclass
class DensityMatrix:
    """Hermitian, unit-trace, positive (to tolerance) state on a layout."""

    op: QOperator
    validate: bool = True
    check_positivity: bool = field(default=False, repr=False)

    def __post_init__(self):
        if self.validate:
            a = self.op.toarray()
            defect = np.abs(a - a.conj().T).max()
            if defect > HERMITICITY_TOL:
                raise DomainError(f"density matrix not Hermitian: defect {defect:.3e}")
            tr = np.trace(a)
            if abs(tr) < 1e-300:
                raise DomainError("density matrix has zero trace")
            if abs(tr - 1.0) > TRACE_TOL:
                a = a / tr.real
                self.op = QOperator(self.op.layout, a)
            if abs(np.trace(self.op.toarray()) - 1.0) > TRACE_TOL:
                raise DomainError("trace not within tolerance of 1 after normalization")
            if self.check_positivity:
                w = np.linalg.eigvalsh(self.op.toarray())
                if w.min() < -POSITIVITY_TOL:
                    raise DomainError(f"negative eigenvalue {w.min():.3e}")

    @property
    def layout(self):
        return self.op.layout

    def matrix(self):
        return self.op.toarray()

    @classmethod
    def ground_state(cls, layout):
        n = layout.total_dim
        m = np.zeros((n, n), dtype=complex)
        m[0, 0] = 1.0
        return cls(QOperator(layout, m), validate=False)

    @classmethod
    def from_ket(cls, ket, layout):
        v = np.asarray(ket, dtype=complex).ravel()
        if v.size != layout.total_dim:
            raise InvalidDimensionError(
                f"ket length {v.size} does not match layout dim {layout.total_dim}"
            )
        v = v / np.linalg.norm(v)
        return cls(QOperator(layout, np.outer(v, v.conj())), validate=False)

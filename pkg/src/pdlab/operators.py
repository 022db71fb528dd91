"""Operator construction (products, Douglas-Rachford, convex combinations)
and orbit / power-norm sweeps.

An OperatorSpec keeps the symbolic recipe next to the materialized matrix
so reports can show which named factor appears in which product.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .linalg import as_matrix, as_vector, spectral_norm, operator_pnorm
from .projections import HILBERT_ORTHOGONAL, ProjectionOp


def _matrix_of(op):
    if isinstance(op, ProjectionOp):
        return op.matrix
    if isinstance(op, OperatorSpec):
        return op.matrix
    return as_matrix(op)


@dataclass(frozen=True)
class OperatorSpec:
    """Convex combination of ordered products of named operators.

    ``terms`` is a tuple of (weight, names) with names in matrix order
    (leftmost factor applied last); the empty product is the identity.
    """

    table: dict
    terms: tuple
    matrix: np.ndarray = field(default=None)

    def __post_init__(self):
        table = {k: _matrix_of(v) for k, v in self.table.items()}
        terms = tuple((float(w), tuple(names)) for w, names in self.terms)
        weights = np.array([w for w, _ in terms])
        if (weights < 0).any():
            raise ValueError("negative weight")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {weights.sum()}, expected 1")
        if not table:
            raise ValueError("the operator table is empty")
        dims = {m.shape[0] for m in table.values()}
        if len(dims) > 1:
            raise ValueError("mixed operator dimensions")
        mat = evaluate_terms(table, terms, next(iter(dims)))
        if self.matrix is not None:
            supplied = as_matrix(self.matrix)
            if spectral_norm(supplied - mat) > 1e-12 * max(1.0, spectral_norm(mat)):
                raise ValueError("materialized matrix disagrees with the expression")
            mat = supplied
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def names_used(self):
        out = []
        for _, names in self.terms:
            for n in names:
                if n not in out:
                    out.append(n)
        return tuple(out)


def evaluate_terms(table, terms, dim):
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for w, names in terms:
        prod = np.eye(dim, dtype=np.complex128)
        for name in names:
            prod = prod @ table[name]
        acc += w * prod
    return acc


def map_operator(projections, names=None):
    """T = P_N ... P_1 for the given factors (P_1 applied first).

    When every factor is a Hilbert orthogonal projection the product is
    checked to be a 2-norm contraction.
    """
    projections = list(projections)
    if not projections:
        raise ValueError("at least one projection is required")
    mats = [_matrix_of(p) for p in projections]
    dims = {m.shape[0] for m in mats}
    if len(dims) > 1:
        raise ValueError("mixed dimensions")
    if names is None:
        names = [f"P{i + 1}" for i in range(len(mats))]
    table = dict(zip(names, mats))
    term_names = tuple(reversed(names))  # matrix order: last factor leftmost
    spec = OperatorSpec(table=table, terms=((1.0, term_names),))
    if all(isinstance(p, ProjectionOp) and p.kind == HILBERT_ORTHOGONAL
           for p in projections):
        norm = spectral_norm(spec.matrix)
        if norm > 1.0 + 1e-10:
            raise ValueError(f"product of orthoprojections has norm {norm}")
    return spec


def dr_generalized(pk, pl, names=("Pk", "Pl")):
    """T = P_k P_l + (I - P_k)(I - P_l) = (I + Q_k Q_l) / 2, Q = 2P - I."""
    mk, ml = _matrix_of(pk), _matrix_of(pl)
    if mk.shape != ml.shape:
        raise ValueError("dimension mismatch")
    d = mk.shape[0]
    eye = np.eye(d)
    direct = mk @ ml + (eye - mk) @ (eye - ml)
    qk, ql = 2 * mk - eye, 2 * ml - eye
    reflected = 0.5 * (eye + qk @ ql)
    if spectral_norm(direct - reflected) > 1e-12 * max(1.0, spectral_norm(direct)):
        raise ValueError("reflection identity violated; inputs are not idempotent")
    nk, nl = names
    return OperatorSpec(
        table={nk: mk, nl: ml, f"Q{nk[1:]}": qk, f"Q{nl[1:]}": ql},
        terms=((0.5, ()), (0.5, (f"Q{nk[1:]}", f"Q{nl[1:]}"))),
        matrix=direct,
    )


def dr_operator(p1, p2):
    """Douglas-Rachford operator T = P_2 P_1 + (I - P_2)(I - P_1)."""
    return dr_generalized(p2, p1, names=("P2", "P1"))


def convex_combination(table, terms):
    """Sum of w_i x (ordered product of named operators), weights on the simplex."""
    return OperatorSpec(table=table, terms=tuple(terms))


@dataclass(frozen=True)
class OrbitTrace:
    """n -> residual curve with the norm it was measured in."""

    values: np.ndarray
    norm: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if not np.isfinite(v).all() or (v < 0).any():
            raise ValueError("residuals must be finite and nonnegative")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size


def orbit(t, x, n, p_t=None, p=2.0):
    """Residuals ||T^n x - P_T x|| for n = 0..N by repeated application.

    ``p_t`` is the limit projection from the fixed-space splitting (None
    means Fix T = {0}, i.e. the zero map). Vector p-norms are exact.
    """
    tm = _matrix_of(t)
    x = as_vector(x)
    if x.size != tm.shape[0]:
        raise ValueError("dimension mismatch")
    if n < 1:
        raise ValueError("N must be >= 1")
    if p_t is None:
        limit = np.zeros_like(x)
    else:
        limit = _matrix_of(p_t) @ x
    vals = _kernels.orbit_residuals(tm, x, limit, int(n), float(p))
    label = "2-norm" if p == 2.0 else f"{p}-norm"
    return OrbitTrace(values=vals, norm=label)


def power_norm_gap(t, p_t, n, space=None):
    """Gap curve ||T^n - P_T|| for n = 0..N.

    Powers are built by sequential multiplication since every intermediate
    index is needed. Default norm is the 2-norm (exact); passing an LpSpace
    switches to the p-norm ascent estimate, which is a lower bound and is
    labeled as such.
    """
    tm = _matrix_of(t)
    pm = (np.zeros_like(tm) if p_t is None else _matrix_of(p_t))
    if pm.shape != tm.shape:
        raise ValueError("dimension mismatch")
    if n < 1:
        raise ValueError("N must be >= 1")
    if space is None:
        vals = _kernels.power_gap_curve(tm, pm, int(n))
        return OrbitTrace(values=vals, norm="2-norm")
    vals = np.empty(n + 1)
    m = np.eye(tm.shape[0], dtype=np.complex128)
    for i in range(n + 1):
        vals[i] = operator_pnorm(m - pm, space.p, mode="estimate", starts=8, iters=80)
        m = tm @ m
    return OrbitTrace(values=vals, norm=f"{space.p}-norm-estimate (lower bound)")

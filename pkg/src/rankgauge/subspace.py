"""Subspaces of a multipartite Hilbert space, stored as orthonormal bases.

The complement projection functional is evaluated in its inner-product
form (cost O(d_S * D)), never through an explicit D x D projector; this
is what keeps large cases cheap.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, UsageError
from .tensor_core import PureState, as_dims

# Constructor check on the basis Gram matrix. Builders in this package
# produce orthonormality at the 1e-12 level; the looser bound accommodates
# bases transported by almost-unitary maps.
ORTHO_TOL = 1e-9
# Default Gram-Schmidt drop tolerance, relative to the largest input norm.
GS_DROP_TOL = 1e-10


@dataclass(frozen=True)
class Subspace:
    """Span of orthonormal vectors; `basis` rows are the basis vectors."""

    dims: tuple[int, ...]
    basis: np.ndarray

    def __post_init__(self):
        dims = as_dims(self.dims)
        d_total = math.prod(dims)
        basis = np.array(self.basis, dtype=np.complex128)
        if basis.ndim == 1:
            basis = basis[None, :]
        if basis.ndim != 2 or basis.shape[1] != d_total:
            raise UsageError(
                f"basis shape {basis.shape} does not match total dimension {d_total}"
            )
        if not 1 <= basis.shape[0] <= d_total:
            raise UsageError(f"subspace dimension {basis.shape[0]} out of range")
        if not np.all(np.isfinite(basis.real)) or not np.all(np.isfinite(basis.imag)):
            raise UsageError("basis must have finite entries")
        gram = basis.conj() @ basis.T
        err = np.max(np.abs(gram - np.eye(basis.shape[0])))
        if err > ORTHO_TOL:
            raise UsageError(f"basis is not orthonormal (Gram deviation {err:.3e})")
        basis.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim_total(self) -> int:
        return self.basis.shape[1]

    def basis_states(self) -> list[PureState]:
        return [PureState(self.dims, row) for row in self.basis]


def span_of(state: PureState) -> Subspace:
    """One-dimensional subspace spanned by a (nonzero) state."""
    return Subspace(state.dims, state.normalize().amp[None, :])


def from_spanning_set(vectors: list[PureState], tol: float = GS_DROP_TOL) -> Subspace:
    """Orthonormal basis of span{vectors} by modified Gram-Schmidt with one
    reorthogonalization pass.

    Vectors whose residual norm falls below tol * max(input norms) are
    dropped as linearly dependent.
    """
    if not vectors:
        raise UsageError("from_spanning_set requires at least one vector")
    dims = vectors[0].dims
    for v in vectors[1:]:
        if v.dims != dims:
            raise UsageError(f"dims mismatch in spanning set: {v.dims} vs {dims}")
    rows = np.array([v.amp for v in vectors], dtype=np.complex128)
    scale = float(np.max(np.linalg.norm(rows, axis=1)))
    if scale <= 0.0:
        raise UsageError("spanning set contains only zero vectors")
    kept: list[np.ndarray] = []
    for row in rows:
        v = row.copy()
        for _ in range(2):  # MGS + one reorthogonalization pass
            for b in kept:
                v -= np.vdot(b, v) * b
        nrm = np.linalg.norm(v)
        if nrm >= tol * scale:
            kept.append(v / nrm)
    if not kept:
        raise UsageError("all vectors were dropped; the span is zero")
    return Subspace(dims, np.array(kept))


def complement_overlap_sq(sub: Subspace, phi: PureState) -> float:
    """<phi| P_perp |phi> = 1 - sum_i |<e_i|phi>|^2, clamped to [0, 1]."""
    if phi.dims != sub.dims:
        raise UsageError(f"dims mismatch: {phi.dims} vs {sub.dims}")
    if abs(phi.norm() - 1.0) > 1e-10:
        raise UsageError("complement_overlap_sq requires a normalized state")
    ov = sub.basis.conj() @ phi.amp
    val = 1.0 - float(np.real(np.vdot(ov, ov)))
    return min(1.0, max(0.0, val))


def complement_basis(sub: Subspace) -> Subspace:
    """Orthonormal basis of the orthogonal complement (dimension D - d_S)."""
    if sub.dim >= sub.dim_total:
        raise UsageError("the full space has no orthogonal complement")
    # Rows d_S.. of Vh span the null space of conj(basis), i.e. the set of
    # vectors orthogonal to every basis vector under <a|b>.
    _, _, vh = np.linalg.svd(sub.basis, full_matrices=True)
    return Subspace(sub.dims, vh[sub.dim:])


def apply_unitary_to_subspace(sub: Subspace, u: np.ndarray) -> Subspace:
    """Subspace spanned by {U e_i} for a unitary U."""
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (sub.dim_total, sub.dim_total):
        raise UsageError(f"unitary shape {u.shape} does not match dimension {sub.dim_total}")
    err = np.max(np.abs(u @ u.conj().T - np.eye(sub.dim_total)))
    if err > 1e-8:
        raise UsageError(f"matrix is not unitary (deviation {err:.3e})")
    return Subspace(sub.dims, sub.basis @ u.T)


@dataclass(frozen=True)
class MixedState:
    """Density matrix over fixed dims: Hermitian, PSD (within -1e-10), unit trace."""

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = as_dims(self.dims)
        d_total = math.prod(dims)
        m = np.array(self.matrix, dtype=np.complex128)
        if m.shape != (d_total, d_total):
            raise UsageError(f"density matrix shape {m.shape}, expected {(d_total, d_total)}")
        if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
            raise UsageError("density matrix must have finite entries")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise UsageError("density matrix is not Hermitian")
        m = (m + m.conj().T) / 2.0
        if abs(np.trace(m).real - 1.0) > 1e-10:
            raise UsageError(f"density matrix trace {np.trace(m).real!r} != 1")
        if np.linalg.eigvalsh(m)[0] < -1e-10:
            raise UsageError("density matrix has a negative eigenvalue beyond tolerance")
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @property
    def dim_total(self) -> int:
        return self.matrix.shape[0]


def pure_density(state: PureState) -> MixedState:
    amp = state.normalize().amp
    return MixedState(state.dims, np.outer(amp, amp.conj()))


def support_space(rho: MixedState, eig_tol: float = 1e-8) -> Subspace:
    """Span of the eigenvectors of rho with eigenvalue > eig_tol.

    Tiny negative eigenvalues (>= -1e-10) are treated as zero; the basis is
    ordered by descending eigenvalue.
    """
    w, v = np.linalg.eigh(rho.matrix)
    w, v = w[::-1], v[:, ::-1]
    keep = w > eig_tol
    if not np.any(keep):
        raise UsageError(f"no eigenvalue above {eig_tol}; support is empty")
    return Subspace(rho.dims, v[:, keep].T.copy())


# ---------------------------------------------------------------------------
# JSON interchange schema:
#   {"dims": [d1, ..., dn],
#    "vectors": [[[re, im], ...], ...],
#    "normalized": bool}
# Vectors may be unnormalized and linearly dependent; amplitude ordering is
# row-major with party 1 slowest, matching PureState.
# ---------------------------------------------------------------------------


def _vector_to_pairs(amp: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in amp]


def subspace_to_dict(sub: Subspace) -> dict:
    return {
        "dims": list(sub.dims),
        "vectors": [_vector_to_pairs(row) for row in sub.basis],
        "normalized": True,
    }


def state_to_dict(state: PureState) -> dict:
    return {
        "dims": list(state.dims),
        "vectors": [_vector_to_pairs(state.amp)],
        "normalized": bool(state.normalized),
    }


def _parse_vectors(obj: dict) -> tuple[tuple[int, ...], np.ndarray]:
    if not isinstance(obj, dict):
        raise InputError("top-level JSON value must be an object")
    for key in ("dims", "vectors"):
        if key not in obj:
            raise InputError(f"missing required field '{key}'")
    try:
        dims = as_dims(obj["dims"])
    except UsageError as exc:
        raise InputError(f"field 'dims': {exc}") from exc
    d_total = math.prod(dims)
    raw = obj["vectors"]
    if not isinstance(raw, list) or not raw:
        raise InputError("field 'vectors' must be a nonempty list")
    rows = np.zeros((len(raw), d_total), dtype=np.complex128)
    for i, vec in enumerate(raw):
        if not isinstance(vec, list) or len(vec) != d_total:
            raise InputError(
                f"field 'vectors[{i}]': expected {d_total} [re, im] pairs, "
                f"got {len(vec) if isinstance(vec, list) else type(vec).__name__}"
            )
        for j, pair in enumerate(vec):
            if (not isinstance(pair, list)) or len(pair) != 2:
                raise InputError(f"field 'vectors[{i}][{j}]': expected [re, im]")
            try:
                rows[i, j] = complex(float(pair[0]), float(pair[1]))
            except (TypeError, ValueError) as exc:
                raise InputError(f"field 'vectors[{i}][{j}]': non-numeric entry") from exc
    if not np.all(np.isfinite(rows.real)) or not np.all(np.isfinite(rows.imag)):
        raise InputError("field 'vectors': entries must be finite")
    return dims, rows


def subspace_from_dict(obj: dict, tol: float = GS_DROP_TOL) -> Subspace:
    dims, rows = _parse_vectors(obj)
    try:
        return from_spanning_set([PureState(dims, row) for row in rows], tol=tol)
    except UsageError as exc:
        raise InputError(str(exc)) from exc


def state_from_dict(obj: dict) -> PureState:
    dims, rows = _parse_vectors(obj)
    if rows.shape[0] != 1:
        raise InputError(f"expected exactly one vector for a pure state, got {rows.shape[0]}")
    state = PureState(dims, rows[0])
    if state.norm() <= 1e-300:
        raise InputError("state vector is zero")
    return state.normalize()


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def load_subspace(path: str, tol: float = GS_DROP_TOL) -> Subspace:
    return subspace_from_dict(_load_json(path), tol=tol)


def load_state(path: str) -> PureState:
    return state_from_dict(_load_json(path))

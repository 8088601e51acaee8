"""Dense complex multilinear algebra for multipartite pure states.

Amplitudes are stored as flat complex vectors, row-major over party
indices with party 1 slowest, so ``amp.reshape(dims)`` recovers the
natural tensor layout. All types are immutable after construction and
every operation is a pure function, so everything here is safe to share
across concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError

# |norm - 1| bound for a state to carry the `normalized` flag.
NORM_ATOL = 1e-12
# Largest accepted asymmetry max|M - M^dag| when ingesting a Hermitian operator.
HERMITIAN_ATOL = 1e-8
# Schmidt coefficients below this do not count toward the Schmidt rank
# (separates optimizer-level noise ~1e-10 from genuine coefficients).
RANK_TOL = 1e-8


def as_dims(dims) -> tuple[int, ...]:
    """Validate and freeze a list of party dimensions (each >= 2, n >= 1)."""
    try:
        out = tuple(int(d) for d in dims)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"party dimensions must be integers, got {dims!r}") from exc
    if not out:
        raise UsageError("at least one party is required")
    if any(d < 2 for d in out):
        raise UsageError(f"every party dimension must be >= 2, got {out}")
    return out


def total_dim(dims) -> int:
    return math.prod(as_dims(dims))


@dataclass(frozen=True)
class PureState:
    """A pure state |psi> over a fixed list of party dimensions.

    `normalized` is derived on construction: True iff the 2-norm of the
    amplitude vector is 1 within NORM_ATOL.
    """

    dims: tuple[int, ...]
    amp: np.ndarray
    normalized: bool = field(init=False)

    def __post_init__(self):
        dims = as_dims(self.dims)
        amp = np.array(self.amp, dtype=np.complex128).ravel()
        if amp.size != math.prod(dims):
            raise UsageError(
                f"amplitude length {amp.size} does not match dims {dims} "
                f"(expected {math.prod(dims)})"
            )
        if not np.all(np.isfinite(amp.real)) or not np.all(np.isfinite(amp.imag)):
            raise UsageError("amplitudes must be finite")
        amp.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amp", amp)
        object.__setattr__(self, "normalized", abs(np.linalg.norm(amp) - 1.0) <= NORM_ATOL)

    @property
    def dim_total(self) -> int:
        return self.amp.size

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def normalize(self) -> "PureState":
        n = self.norm()
        if n <= 1e-300:
            raise UsageError("cannot normalize a zero state")
        return PureState(self.dims, self.amp / n)

    def as_tensor(self) -> np.ndarray:
        return self.amp.reshape(self.dims)


def basis_state(dims, indices) -> PureState:
    """Computational basis state |i_1 i_2 ... i_n> for the given dims."""
    dims = as_dims(dims)
    idx = np.ravel_multi_index(tuple(int(i) for i in indices), dims)
    amp = np.zeros(math.prod(dims), dtype=np.complex128)
    amp[idx] = 1.0
    return PureState(dims, amp)


def haar_random_state(dims, rng: np.random.Generator) -> PureState:
    """Normalized state with amplitudes drawn from the complex Gaussian
    ensemble (Haar distributed on the unit sphere)."""
    dims = as_dims(dims)
    d = math.prod(dims)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(dims, z / np.linalg.norm(z))


def kron_chain(factors: list[PureState]) -> PureState:
    """Tensor product of single-party states, party order = list order."""
    if not factors:
        raise UsageError("kron_chain requires at least one factor")
    for f in factors:
        if f.n_parties != 1:
            raise UsageError("every kron_chain factor must be a single-party state")
    amp = factors[0].amp
    for f in factors[1:]:
        amp = np.kron(amp, f.amp)
    dims = tuple(f.dims[0] for f in factors)
    return PureState(dims, amp)


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.dims != b.dims:
        raise UsageError(f"dims mismatch: {a.dims} vs {b.dims}")
    return complex(np.vdot(a.amp, b.amp))


@dataclass(frozen=True)
class Bipartition:
    """A cut K | K^c of the parties, with 1-based party indices."""

    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        left = tuple(sorted(int(p) for p in self.left))
        right = tuple(sorted(int(p) for p in self.right))
        n = len(left) + len(right)
        if not left or not right:
            raise UsageError("both sides of a bipartition must be nonempty")
        if sorted(left + right) != list(range(1, n + 1)):
            raise UsageError(
                f"bipartition sides must partition parties 1..{n}, got {left} | {right}"
            )
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @classmethod
    def of(cls, left, n_parties: int) -> "Bipartition":
        left = tuple(sorted(int(p) for p in left))
        right = tuple(p for p in range(1, n_parties + 1) if p not in left)
        return cls(left, right)

    @property
    def n_parties(self) -> int:
        return len(self.left) + len(self.right)

    def __str__(self) -> str:
        return "+".join(map(str, self.left)) + "|" + "+".join(map(str, self.right))


def canonical_bipartitions(n_parties: int) -> list[Bipartition]:
    """All 2^(n-1) - 1 nontrivial bipartitions, canonicalized so party 1
    is on the left, in deterministic order."""
    if n_parties < 2:
        raise UsageError("bipartitions require at least two parties")
    cuts = []
    others = list(range(2, n_parties + 1))
    for mask in range(2 ** len(others)):
        left = (1,) + tuple(p for i, p in enumerate(others) if mask >> i & 1)
        if len(left) == n_parties:
            continue
        cuts.append(Bipartition.of(left, n_parties))
    cuts.sort(key=lambda c: (len(c.left), c.left))
    return cuts


def reshape_bipartite(s: PureState, cut: Bipartition) -> np.ndarray:
    """Coefficient matrix of `s` across the cut, shape (prod d_K, prod d_K^c).

    A pure axis permutation + reshape: bijective on amplitudes, so the
    Frobenius norm equals the state norm.
    """
    if cut.n_parties != s.n_parties:
        raise UsageError(
            f"cut covers {cut.n_parties} parties but state has {s.n_parties}"
        )
    axes = [p - 1 for p in cut.left] + [p - 1 for p in cut.right]
    d_left = math.prod(s.dims[p - 1] for p in cut.left)
    d_right = math.prod(s.dims[p - 1] for p in cut.right)
    return s.as_tensor().transpose(axes).reshape(d_left, d_right)


def schmidt_coefficients(s: PureState, cut: Bipartition) -> np.ndarray:
    """Descending Schmidt coefficients of a normalized state across `cut`."""
    if abs(s.norm() - 1.0) > 1e-10:
        raise UsageError("schmidt_coefficients requires a normalized state")
    return np.linalg.svd(reshape_bipartite(s, cut), compute_uv=False)


def schmidt_rank(s: PureState, cut: Bipartition, tol: float = RANK_TOL) -> int:
    """Number of Schmidt coefficients above `tol`."""
    return int(np.sum(schmidt_coefficients(s, cut) > tol))


def svd_complex(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """SVD m = U @ diag(s) @ Vh with descending singular values and square
    unitary U, Vh."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise UsageError("svd_complex expects a matrix")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise UsageError("svd_complex requires finite entries")
    return np.linalg.svd(m, full_matrices=True)


@dataclass(frozen=True)
class HermitianOp:
    """A Hermitian operator; the stored matrix is the exact Hermitian part
    of the input, which must be Hermitian within HERMITIAN_ATOL."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise UsageError("HermitianOp requires a square matrix")
        if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
            raise UsageError("HermitianOp requires finite entries")
        asym = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if asym > HERMITIAN_ATOL:
            raise UsageError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
        m = (m + m.conj().T) / 2.0
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _as_hermitian(h) -> np.ndarray:
    if isinstance(h, HermitianOp):
        return h.matrix
    return HermitianOp(h).matrix


def hermitian_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian operator: descending real
    eigenvalues and the matching unitary eigenvector matrix (columns)."""
    m = _as_hermitian(h)
    w, v = np.linalg.eigh(m)
    return w[::-1].copy(), v[:, ::-1].copy()


def unitary_from_hamiltonian(h) -> np.ndarray:
    """U = exp(-iH) via the eigendecomposition of H."""
    w, v = hermitian_eig(h)
    return (v * np.exp(-1j * w)) @ v.conj().T


def trace_norm(h) -> float:
    """Sum of the absolute eigenvalues of a Hermitian operator."""
    w, _ = hermitian_eig(h)
    return float(np.sum(np.abs(w)))

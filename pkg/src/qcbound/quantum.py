"""N-qubit operator algebra, dense Hermitian eigendecomposition, and partial traces.

Tensor-ordering convention (shared by every module in this package): site 0 maps
to the MOST significant bit of the computational-basis index.  For two qubits the
basis is ordered |00>, |01>, |10>, |11> with the left bit belonging to site 0, so
``embed_site(pauli('z'), 0, 2)`` is diag(+1, +1, -1, -1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np

__all__ = [
    "HERMITICITY_WARN_ATOL",
    "DEGENERACY_RTOL",
    "EigensolverError",
    "DegenerateSpectrumError",
    "HermitianOperator",
    "SpectralDecomposition",
    "QubitPartition",
    "pauli",
    "embed_site",
    "heisenberg_coupling",
    "eigensystem",
    "partial_trace",
    "partial_trace_dyad",
]

# Symmetrization corrections above this trigger a warning (inputs are expected
# to be Hermitian to machine precision already).
HERMITICITY_WARN_ATOL = 1e-10

# A spectrum counts as degenerate when min_gap < DEGENERACY_RTOL * spectral
# width; derivative formulas with 1/(eps_n - eps_m) poles must refuse it.
DEGENERACY_RTOL = 1e-10

_PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


class EigensolverError(RuntimeError):
    """The underlying LAPACK eigensolver failed to converge."""


class DegenerateSpectrumError(ValueError):
    """A (near-)degenerate pair makes a 1/(eps_n - eps_m) pole ill-defined."""


@dataclass(frozen=True)
class HermitianOperator:
    """Dense Hermitian matrix in dimensionless energy units.

    The stored matrix is symmetrized as (M + M^dag)/2 on construction and made
    read-only.  Real symmetric input stays real (cheaper eigensolves); complex
    input stays complex.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] < 2:
            raise ValueError("operator dimension must be >= 2")
        m = m.astype(complex if np.iscomplexobj(m) else float)
        sym = 0.5 * (m + m.conj().T)
        drift = float(np.max(np.abs(m - sym))) if m.size else 0.0
        if drift > HERMITICITY_WARN_ATOL:
            warnings.warn(
                f"input symmetrized; max Hermiticity correction {drift:.3e}",
                stacklevel=2,
            )
        sym.setflags(write=False)
        object.__setattr__(self, "matrix", sym)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix + other.matrix)

    def __mul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(self.matrix * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and matching orthonormal eigenvectors.

    ``eigenvectors[:, n]`` is the eigenvector of ``eigenvalues[n]``; each column
    has its largest-magnitude component rotated to be real and positive so that
    repeated decompositions are bit-reproducible.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    min_gap: float

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def spectral_width(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def vector(self, n: int) -> np.ndarray:
        return self.eigenvectors[:, n]

    def require_nondegenerate(self) -> None:
        """Refuse spectra whose smallest gap cannot support 1/gap sums."""
        width = self.spectral_width
        if width <= 0.0 or self.min_gap <= DEGENERACY_RTOL * width:
            raise DegenerateSpectrumError(
                f"min gap {self.min_gap:.3e} below degeneracy guard "
                f"({DEGENERACY_RTOL:.0e} x width {width:.3e})"
            )


@dataclass(frozen=True)
class QubitPartition:
    """Bipartition of an N-qubit register: ``kept`` sites form subsystem A."""

    n_qubits: int
    kept: tuple

    def __post_init__(self) -> None:
        sites = tuple(sorted(set(int(s) for s in self.kept)))
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        if not sites:
            raise ValueError("kept set must be nonempty")
        if len(sites) >= self.n_qubits:
            raise ValueError("kept set must be a strict subset of the sites")
        if sites[0] < 0 or sites[-1] >= self.n_qubits:
            raise ValueError(f"site indices out of range [0, {self.n_qubits})")
        object.__setattr__(self, "kept", sites)

    @classmethod
    def single_site(cls, site: int, n_qubits: int) -> "QubitPartition":
        return cls(n_qubits=n_qubits, kept=(site,))

    @property
    def dim_kept(self) -> int:
        return 2 ** len(self.kept)


def pauli(axis: str) -> HermitianOperator:
    """Standard 2x2 Pauli matrix for axis 'x', 'y' or 'z'."""
    try:
        return HermitianOperator(_PAULI[axis])
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}; expected one of x, y, z") from None


def _embed(matrix: np.ndarray, site: int, n_qubits: int) -> np.ndarray:
    if not 0 <= site < n_qubits:
        raise ValueError(f"site {site} out of range for {n_qubits} qubits")
    eye = np.eye(2, dtype=matrix.dtype)
    factors = [matrix if j == site else eye for j in range(n_qubits)]
    return reduce(np.kron, factors)


def embed_site(op: HermitianOperator, site: int, n_qubits: int) -> HermitianOperator:
    """Tensor-embed a single-qubit operator at ``site`` (identity elsewhere)."""
    if op.dim != 2:
        raise ValueError("embed_site expects a single-qubit (2x2) operator")
    return HermitianOperator(_embed(op.matrix, site, n_qubits))


def heisenberg_coupling(i: int, j: int, n_qubits: int) -> HermitianOperator:
    """sigma_i . sigma_j: isotropic Pauli-vector coupling of two sites."""
    if i == j:
        raise ValueError("coupling requires two distinct sites")
    total = sum(
        _embed(_PAULI[a], i, n_qubits) @ _embed(_PAULI[a], j, n_qubits)
        for a in ("x", "y", "z")
    )
    return HermitianOperator(total.real if np.allclose(total.imag, 0.0) else total)


def eigensystem(op: HermitianOperator) -> SpectralDecomposition:
    """Full dense eigendecomposition with fixed eigenvector phases.

    Raises EigensolverError if LAPACK does not converge (never silently).
    """
    try:
        eigenvalues, vectors = np.linalg.eigh(op.matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver failed on dim-{op.dim} operator: {exc}") from exc
    # Phase gauge: rotate each column so its largest-|.| component is real > 0.
    pivots = np.argmax(np.abs(vectors), axis=0)
    pivot_values = vectors[pivots, np.arange(vectors.shape[1])]
    phases = pivot_values / np.abs(pivot_values)
    vectors = vectors * phases.conj()[np.newaxis, :]
    eigenvalues.setflags(write=False)
    vectors.setflags(write=False)
    return SpectralDecomposition(
        eigenvalues=eigenvalues,
        eigenvectors=vectors,
        min_gap=float(np.min(np.diff(eigenvalues))),
    )


def _require_qubit_dim(dim: int, partition: QubitPartition) -> None:
    if dim != 2**partition.n_qubits:
        raise ValueError(
            f"vector dimension {dim} is not 2^{partition.n_qubits}; "
            "a qubit partition needs a power-of-two Hilbert space"
        )


def _as_site_matrix(vec: np.ndarray, partition: QubitPartition) -> np.ndarray:
    """Reshape a state vector to (dim_A, dim_B) with kept-site axes leading."""
    n = partition.n_qubits
    tensor = vec.reshape((2,) * n)
    order = list(partition.kept) + [s for s in range(n) if s not in partition.kept]
    return np.transpose(tensor, order).reshape(partition.dim_kept, -1)


def _resolve_state(state, decomposition) -> np.ndarray:
    if isinstance(state, (int, np.integer)):
        if decomposition is None:
            raise ValueError("an eigenvector index needs a decomposition to resolve it")
        return decomposition.eigenvectors[:, int(state)]
    return np.asarray(state)


def partial_trace_dyad(ket, bra, partition: QubitPartition, decomposition=None) -> np.ndarray:
    """tr_B(|ket><bra|) on subsystem A without forming the full dyad.

    ``ket``/``bra`` are state vectors or eigenvector indices into
    ``decomposition``.  For ket == bra the result is a density matrix.
    """
    k = _resolve_state(ket, decomposition)
    l = _resolve_state(bra, decomposition)
    _require_qubit_dim(k.shape[0], partition)
    km = _as_site_matrix(k, partition)
    lm = _as_site_matrix(l, partition)
    return km @ lm.conj().T


def partial_trace(rho: np.ndarray, partition: QubitPartition) -> np.ndarray:
    """tr_B of a density matrix (independent matrix-contraction code path)."""
    n = partition.n_qubits
    _require_qubit_dim(rho.shape[0], partition)
    tensor = rho.reshape((2,) * (2 * n))
    # Contract row/column axes of every traced-out site pairwise.
    for site in sorted((s for s in range(n) if s not in partition.kept), reverse=True):
        tensor = np.trace(tensor, axis1=site, axis2=site + tensor.ndim // 2)
    d = partition.dim_kept
    return tensor.reshape(d, d)

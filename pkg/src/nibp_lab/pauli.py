"""Pauli strings, the normalized Hermitian operator basis, and coherence vectors.

States are carried in two equivalent forms: a dense density matrix and a real
coherence vector holding the components of the traceless part of the state in
the normalized Pauli basis {P_j / sqrt(d)}.  Basis elements are ordered by
Hamming weight (number of non-identity letters); within a weight class the
order is lexicographic in (qubit positions, letter) with X < Y < Z.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product

import numpy as np

MAX_QUBITS = 9

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


class SizeError(ValueError):
    """Qubit count outside the supported range."""


class DimensionMismatchError(ValueError):
    """Operands act on different numbers of qubits."""


class InvalidStateError(ValueError):
    """A reconstructed or supplied matrix is not a valid density matrix."""

    def __init__(self, message: str, min_eigenvalue: float | None = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


@lru_cache(maxsize=4096)
def _pauli_matrix(letters: str) -> np.ndarray:
    mat = _PAULI_1Q[letters[0]]
    for ch in letters[1:]:
        mat = np.kron(mat, _PAULI_1Q[ch])
    mat.setflags(write=False)
    return mat


@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-qubit Pauli operators, e.g. "XIZ"."""

    letters: str

    def __post_init__(self):
        if not self.letters or any(ch not in "IXYZ" for ch in self.letters):
            raise ValueError(f"invalid Pauli letters: {self.letters!r}")

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def hamming_weight(self) -> int:
        return sum(ch != "I" for ch in self.letters)

    def matrix(self) -> np.ndarray:
        return _pauli_matrix(self.letters)

    def __str__(self) -> str:
        return self.letters


def pauli_strings_by_weight(n: int) -> list[str]:
    """All length-n Pauli letter strings ordered by Hamming weight."""
    out = ["I" * n]
    for weight in range(1, n + 1):
        for positions in combinations(range(n), weight):
            for letters in product("XYZ", repeat=weight):
                chars = ["I"] * n
                for pos, letter in zip(positions, letters):
                    chars[pos] = letter
                out.append("".join(chars))
    return out


@dataclass(frozen=True)
class NiceBasis:
    """Orthonormal Hermitian basis {P_j / sqrt(d)} with F_0 the scaled identity."""

    n: int
    strings: tuple[str, ...]
    stack: np.ndarray = field(repr=False)  # (d^2, d, d), stack[j] = F_j

    @property
    def dim(self) -> int:
        return 2**self.n

    @property
    def size(self) -> int:
        return self.dim**2

    def element(self, j: int) -> np.ndarray:
        return self.stack[j]

    @property
    def elements(self) -> np.ndarray:
        return self.stack

    def hamming_weight(self, j: int) -> int:
        return sum(ch != "I" for ch in self.strings[j])


@lru_cache(maxsize=MAX_QUBITS)
def build_nice_basis(n: int) -> NiceBasis:
    """Build the normalized Pauli basis for n qubits, Hamming-weight ordered."""
    if not 1 <= n <= MAX_QUBITS:
        raise SizeError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    d = 2**n
    strings = pauli_strings_by_weight(n)
    stack = np.stack([_pauli_matrix(s) for s in strings]) / np.sqrt(d)
    stack.setflags(write=False)
    return NiceBasis(n=n, strings=tuple(strings), stack=stack)


@dataclass(frozen=True)
class DensityMatrix:
    """An n-qubit state as a dense d x d complex matrix."""

    n: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = 2**self.n
        if self.data.shape != (d, d):
            raise DimensionMismatchError(
                f"expected shape {(d, d)}, got {self.data.shape}"
            )

    def validate(self, positivity_tol: float = 1e-9) -> "DensityMatrix":
        """Check Hermiticity, unit trace, and positivity within tolerances."""
        herm = np.linalg.norm(self.data - self.data.conj().T, np.inf)
        if herm > 1e-10:
            raise InvalidStateError(f"not Hermitian (residual {herm:.2e})")
        tr = abs(self.data.trace() - 1.0)
        if tr > 1e-10:
            raise InvalidStateError(f"trace deviates from 1 by {tr:.2e}")
        min_eig = float(np.linalg.eigvalsh(self.data)[0])
        if min_eig < -positivity_tol:
            raise InvalidStateError(
                f"negative eigenvalue {min_eig:.3e}", min_eigenvalue=min_eig
            )
        return self

    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))

    @classmethod
    def from_statevector(cls, psi: np.ndarray) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        n = int(round(np.log2(psi.size)))
        psi = psi / np.linalg.norm(psi)
        return cls(n=n, data=np.outer(psi, psi.conj()))

    @classmethod
    def ground_state(cls, n: int) -> "DensityMatrix":
        psi = np.zeros(2**n, dtype=complex)
        psi[0] = 1.0
        return cls.from_statevector(psi)

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        d = 2**n
        return cls(n=n, data=np.eye(d, dtype=complex) / d)


@dataclass(frozen=True)
class CoherenceVector:
    """Real coefficients of the traceless part of a state, length d^2 - 1."""

    n: int
    v: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = 2**self.n
        if self.v.shape != (d**2 - 1,):
            raise DimensionMismatchError(
                f"expected length {d**2 - 1}, got {self.v.shape}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.v))


def to_coherence(rho: DensityMatrix, basis: NiceBasis) -> CoherenceVector:
    """Project a state onto the traceless basis elements: v_j = Tr(F_j rho)."""
    if rho.n != basis.n:
        raise DimensionMismatchError(f"state has n={rho.n}, basis n={basis.n}")
    v = np.einsum("jab,ba->j", basis.stack[1:], rho.data)
    return CoherenceVector(n=rho.n, v=np.real(v))


def from_coherence(
    v: CoherenceVector, basis: NiceBasis, positivity_tol: float = 1e-9
) -> DensityMatrix:
    """Reconstruct rho = I/d + sum_j v_j F_j; rejects non-positive results.

    A norm bound on v is necessary but not sufficient for positivity when
    d > 2, so the reconstructed matrix is always eigenvalue-checked.
    """
    if v.n != basis.n:
        raise DimensionMismatchError(f"vector has n={v.n}, basis n={basis.n}")
    d = basis.dim
    data = np.eye(d, dtype=complex) / d + np.tensordot(v.v, basis.stack[1:], axes=1)
    rho = DensityMatrix(n=v.n, data=data)
    min_eig = float(np.linalg.eigvalsh(data)[0])
    if min_eig < -positivity_tol:
        raise InvalidStateError(
            f"coherence vector does not describe a state (min eigenvalue "
            f"{min_eig:.3e})",
            min_eigenvalue=min_eig,
        )
    return rho


def purity_identity_check(rho: DensityMatrix) -> tuple[float, float, float]:
    """Return (purity, ||v||, residual) for ||v|| = sqrt(Tr rho^2 - 1/d)."""
    basis = build_nice_basis(rho.n)
    purity = rho.purity()
    vnorm = to_coherence(rho, basis).norm()
    residual = abs(vnorm - np.sqrt(max(purity - 1.0 / basis.dim, 0.0)))
    return purity, vnorm, residual


def random_density_matrix(n: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random mixed state from a Wishart-style construction."""
    d = 2**n
    rank = rank or d
    w = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    data = w @ w.conj().T
    data /= data.trace()
    return DensityMatrix(n=n, data=data)


def random_pure_state(n: int, rng: np.random.Generator) -> DensityMatrix:
    d = 2**n
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return DensityMatrix.from_statevector(psi)

"""CPTP channels in Kraus form and their affine coherence-vector representation.

A channel rho -> sum_a K_a rho K_a^dag acts on coherence vectors as the
affine map v -> M v + c.  M and c are computed from the transfer matrix
T_ij = Tr(F_i N(F_j)) over the normalized Pauli basis; c follows from the
identity column.  The shift is reported in two conventions: "nice" (the
normalized basis used internally) and "bloch" (rescaled by sqrt(d), matching
the textbook single-qubit Bloch parametrization).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pauli import (
    DensityMatrix,
    DimensionMismatchError,
    NiceBasis,
    SizeError,
    build_nice_basis,
)

AFFINE_MAX_QUBITS = 3  # (d^2-1)^2 storage makes explicit M infeasible beyond this

UNITAL_TOL = 1e-9
CONTRACTIVE_MARGIN = 1e-9

CLASS_UNITARY = "unitary"
CLASS_UNITAL_NONUNITARY = "unital_nonunitary"
CLASS_HS_CONTRACTIVE_NONUNITAL = "hs_contractive_nonunital"
CLASS_NONUNITAL_NONCONTRACTIVE = "nonunital_noncontractive"


class InvalidChannelError(ValueError):
    """The Kraus set does not describe a trace-preserving channel."""


@dataclass(frozen=True)
class KrausChannel:
    """A completely positive map given by its Kraus operators."""

    n: int
    kraus_ops: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        if not self.kraus_ops:
            raise InvalidChannelError("empty Kraus list")
        d = 2**self.n
        for k in self.kraus_ops:
            if k.shape != (d, d):
                raise DimensionMismatchError(
                    f"Kraus operator shape {k.shape} != {(d, d)}"
                )

    @property
    def dim(self) -> int:
        return 2**self.n

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho)
        for k in self.kraus_ops:
            out += k @ rho @ k.conj().T
        return out

    def apply_state(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.n != self.n:
            raise DimensionMismatchError(f"state n={rho.n}, channel n={self.n}")
        return DensityMatrix(n=self.n, data=self.apply(rho.data))


@dataclass(frozen=True)
class ValidationReport:
    trace_preserving: bool
    unital: bool
    tp_residual: float
    unital_residual: float


@dataclass(frozen=True)
class AffineRep:
    """Affine action v -> M v + c on coherence vectors (nice-basis convention)."""

    n: int
    M: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)
    basis_convention: str = "nice"

    @property
    def c_bloch(self) -> np.ndarray:
        """Shift in the Bloch convention (coherence vector scaled by sqrt(d))."""
        return self.c * np.sqrt(2.0**self.n)

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.M @ v + self.c

    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.M, 2))

    def is_unital(self, tol: float = UNITAL_TOL) -> bool:
        return float(np.linalg.norm(self.c)) <= tol


@dataclass(frozen=True)
class ChannelClass:
    kind: str
    operator_norm_M: float
    sigma_max: float
    sigma_min: float


def validate_kraus(ch: KrausChannel) -> ValidationReport:
    """Report trace-preservation and unitality residuals (inf-norm)."""
    d = ch.dim
    eye = np.eye(d)
    tp = sum(k.conj().T @ k for k in ch.kraus_ops)
    un = sum(k @ k.conj().T for k in ch.kraus_ops)
    tp_res = float(np.linalg.norm(tp - eye, 2))
    un_res = float(np.linalg.norm(un - eye, 2))
    return ValidationReport(
        trace_preserving=tp_res <= UNITAL_TOL,
        unital=un_res <= UNITAL_TOL,
        tp_residual=tp_res,
        unital_residual=un_res,
    )


def _superoperator(ch: KrausChannel) -> np.ndarray:
    """Row-major-vec superoperator: vec(N(X)) = S vec(X)."""
    return sum(np.kron(k, k.conj()) for k in ch.kraus_ops)


def transfer_matrix(ch: KrausChannel, basis: NiceBasis) -> np.ndarray:
    """T_ij = Tr(F_i N(F_j)) over the full basis including the identity row."""
    s = _superoperator(ch)
    d = basis.dim
    b = basis.stack.reshape(d * d, d * d)
    t = b.conj() @ s @ b.T
    imag = float(np.abs(t.imag).max())
    if imag > 1e-12:
        raise InvalidChannelError(f"transfer matrix not real (residual {imag:.2e})")
    return t.real


def affine_rep(ch: KrausChannel, basis: NiceBasis | None = None) -> AffineRep:
    """Explicit (M, c) of a channel; guarded to small qubit counts."""
    if ch.n > AFFINE_MAX_QUBITS:
        raise SizeError(
            f"explicit affine representation limited to n <= {AFFINE_MAX_QUBITS}"
        )
    report = validate_kraus(ch)
    if not report.trace_preserving:
        raise InvalidChannelError(
            f"not trace preserving (residual {report.tp_residual:.2e})"
        )
    basis = basis or build_nice_basis(ch.n)
    if basis.n != ch.n:
        raise DimensionMismatchError(f"basis n={basis.n}, channel n={ch.n}")
    t = transfer_matrix(ch, basis)
    m = t[1:, 1:]
    c = t[1:, 0] / np.sqrt(basis.dim)
    return AffineRep(n=ch.n, M=m, c=c)


def polar_decompose(rep: AffineRep) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """M = O S with O orthogonal, S symmetric PSD; singular values descending."""
    if not np.all(np.isfinite(rep.M)):
        raise ValueError("non-finite entries in M")
    u, s, vt = np.linalg.svd(rep.M)
    o = u @ vt
    dilation = vt.T @ np.diag(s) @ vt
    return o, dilation, s


def classify(ch: KrausChannel) -> ChannelClass:
    """Sort a channel into the unitary / unital / HS-contractive taxonomy."""
    rep = affine_rep(ch)
    sv = np.linalg.svd(rep.M, compute_uv=False)
    opnorm = float(sv[0])
    unital = rep.is_unital()
    if unital and float(np.abs(sv - 1.0).max()) <= UNITAL_TOL:
        kind = CLASS_UNITARY
    elif unital:
        kind = CLASS_UNITAL_NONUNITARY
    elif opnorm < 1.0 - CONTRACTIVE_MARGIN:
        kind = CLASS_HS_CONTRACTIVE_NONUNITAL
    else:
        kind = CLASS_NONUNITAL_NONCONTRACTIVE
    return ChannelClass(
        kind=kind,
        operator_norm_M=opnorm,
        sigma_max=float(sv[0]),
        sigma_min=float(sv[-1]),
    )


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """Channel applying `first` then `second`; Kraus set is all products."""
    if second.n != first.n:
        raise DimensionMismatchError(f"n mismatch: {second.n} vs {first.n}")
    ops = tuple(
        k2 @ k1 for k2 in second.kraus_ops for k1 in first.kraus_ops
    )
    return KrausChannel(n=second.n, kraus_ops=ops)


def tensor_channel(per_qubit: list[KrausChannel]) -> KrausChannel:
    """Tensor product of single-qubit channels acting on a register."""
    if any(ch.n != 1 for ch in per_qubit):
        raise DimensionMismatchError("every factor must be a single-qubit channel")
    n = len(per_qubit)
    if n > 9:
        raise SizeError(f"register size {n} exceeds cap of 9")
    ops = [np.eye(1, dtype=complex)]
    for ch in per_qubit:
        ops = [np.kron(a, k) for a in ops for k in ch.kraus_ops]
    return KrausChannel(n=n, kraus_ops=tuple(ops))


# ---------------------------------------------------------------------------
# Channel zoo
# ---------------------------------------------------------------------------


def identity_channel(n: int = 1) -> KrausChannel:
    return KrausChannel(n=n, kraus_ops=(np.eye(2**n, dtype=complex),))


def unitary_channel(u: np.ndarray) -> KrausChannel:
    n = int(round(np.log2(u.shape[0])))
    return KrausChannel(n=n, kraus_ops=(np.asarray(u, dtype=complex),))


def depolarizing(p: float) -> KrausChannel:
    """Single-qubit depolarizing map with error probability p."""
    from .pauli import _pauli_matrix

    ops = (np.sqrt(1.0 - p) * np.eye(2, dtype=complex),) + tuple(
        np.sqrt(p / 3.0) * _pauli_matrix(s) for s in "XYZ"
    )
    return KrausChannel(n=1, kraus_ops=ops)


def amplitude_damping(p: float) -> KrausChannel:
    """Relaxation toward |0> with excited-state decay probability p."""
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - p)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(p)], [0.0, 0.0]], dtype=complex)
    return KrausChannel(n=1, kraus_ops=(k0, k1))


def bit_flip(p: float) -> KrausChannel:
    """Kraus set {sqrt(p) I, sqrt(1-p) X}: the bit flips with probability 1-p."""
    from .pauli import _pauli_matrix

    return KrausChannel(
        n=1,
        kraus_ops=(
            np.sqrt(p) * np.eye(2, dtype=complex),
            np.sqrt(1.0 - p) * _pauli_matrix("X"),
        ),
    )


def phase_flip(p: float) -> KrausChannel:
    from .pauli import _pauli_matrix

    return KrausChannel(
        n=1,
        kraus_ops=(
            np.sqrt(p) * np.eye(2, dtype=complex),
            np.sqrt(1.0 - p) * _pauli_matrix("Z"),
        ),
    )


def flip_then_damp(p: float) -> KrausChannel:
    """Bit flip at the symmetric point followed by amplitude damping.

    Its dilation matrix is diag(sqrt(1-p), 0, 0): a non-unital channel with a
    vanishing smallest singular value.
    """
    return compose(amplitude_damping(p), bit_flip(0.5))


def random_unitary_matrix(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(
    n: int, rng: np.random.Generator, kraus_count: int = 2
) -> KrausChannel:
    """Random CPTP channel: slice a Haar-random isometry into Kraus blocks."""
    d = 2**n
    z = rng.standard_normal((d * kraus_count, d)) + 1j * rng.standard_normal(
        (d * kraus_count, d)
    )
    q, _ = np.linalg.qr(z)
    ops = tuple(q[i * d : (i + 1) * d, :] for i in range(kraus_count))
    return KrausChannel(n=n, kraus_ops=ops)


def random_nonunital_channel(
    n: int, rng: np.random.Generator, kraus_count: int = 2, max_tries: int = 100
) -> KrausChannel:
    """Random channel rejected until clearly non-unital."""
    for _ in range(max_tries):
        ch = random_channel(n, rng, kraus_count=kraus_count)
        if validate_kraus(ch).unital_residual >= 1e-6:
            return ch
    raise RuntimeError("failed to draw a non-unital channel")


def random_unital_channel(
    n: int, rng: np.random.Generator, mixture_size: int = 3
) -> KrausChannel:
    """Random mixture of Haar-random unitaries (unital by construction)."""
    d = 2**n
    probs = rng.dirichlet(np.ones(mixture_size))
    ops = tuple(
        np.sqrt(p) * random_unitary_matrix(d, rng) for p in probs
    )
    return KrausChannel(n=n, kraus_ops=ops)


_NAMED_CHANNELS = {
    "identity": lambda p=0.0: identity_channel(1),
    "depolarizing": depolarizing,
    "amplitude_damping": amplitude_damping,
    "bit_flip": bit_flip,
    "phase_flip": phase_flip,
    "flip_then_damp": flip_then_damp,
}


def named_channel(name: str, p: float = 0.0) -> KrausChannel:
    try:
        factory = _NAMED_CHANNELS[name]
    except KeyError:
        raise KeyError(
            f"unknown channel {name!r}; choices: {sorted(_NAMED_CHANNELS)}"
        ) from None
    return factory(p)

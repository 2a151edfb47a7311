"""Layered parameterized circuits with per-layer CPTP noise.

A circuit is a list of layers; each layer is a sequence of gates, either
Pauli-rotation gates exp(-i theta P / 2) or fixed unitaries (CNOTs).  Noise
enters in three ways: a CPTP channel applied after each layer, a coherent
perturbation of a rotation's generator (control noise), and a probabilistic
mixture of rotations sharing the intended angle (random-unitary noise).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .channels import KrausChannel, unitary_channel
from .pauli import (
    DensityMatrix,
    DimensionMismatchError,
    PauliString,
    _pauli_matrix,
)

CONTROL_NOISE_NORM_CAP = 0.2

Location = tuple[int, int]


def embed_unitary(u: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Lift a k-qubit operator to the full 2^n space on the given qubits."""
    k = len(targets)
    if u.shape != (2**k, 2**k):
        raise DimensionMismatchError(f"operator shape {u.shape} for {k} targets")
    others = [q for q in range(n) if q not in targets]
    perm = list(targets) + others
    inv = np.argsort(perm)
    full = np.kron(u, np.eye(2 ** (n - k), dtype=complex))
    t = full.reshape((2,) * (2 * n))
    t = t.transpose(list(inv) + [n + i for i in inv])
    return np.ascontiguousarray(t.reshape(2**n, 2**n))


@lru_cache(maxsize=256)
def _cnot_full(control: int, target: int, n: int) -> np.ndarray:
    cnot = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )
    mat = embed_unitary(cnot, (control, target), n)
    mat.setflags(write=False)
    return mat


@dataclass(frozen=True)
class Gate:
    """One gate: a Pauli rotation (kind "param") or a fixed unitary."""

    kind: str  # "param" | "fixed"
    location: Location
    target_qubits: tuple[int, ...]
    generator: PauliString | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)  # full-space, fixed
    perturbation: tuple[tuple[str, float], ...] | None = None

    @property
    def is_parameterized(self) -> bool:
        return self.kind == "param"

    def generator_matrix(self) -> np.ndarray:
        """Hermitian generator, including any control-noise perturbation."""
        g = np.array(self.generator.matrix())
        if self.perturbation:
            for letters, coeff in self.perturbation:
                g = g + coeff * _pauli_matrix(letters)
        return g

    def unitary(self, theta: float) -> np.ndarray:
        """exp(-i theta G / 2) on the full register."""
        if self.kind == "fixed":
            return self.matrix
        if not self.perturbation:
            p = self.generator.matrix()
            d = p.shape[0]
            return np.cos(theta / 2) * np.eye(d, dtype=complex) - 1j * np.sin(
                theta / 2
            ) * p
        g = self.generator_matrix()
        w, vec = np.linalg.eigh(g)
        return (vec * np.exp(-0.5j * theta * w)) @ vec.conj().T


def ry_gate(qubit: int, n: int, location: Location) -> Gate:
    letters = "".join("Y" if q == qubit else "I" for q in range(n))
    return Gate(
        kind="param",
        location=location,
        target_qubits=(qubit,),
        generator=PauliString(letters),
    )


def cnot_gate(control: int, target: int, n: int, location: Location) -> Gate:
    return Gate(
        kind="fixed",
        location=location,
        target_qubits=(control, target),
        matrix=_cnot_full(control, target, n),
    )


def perturbed_gate(g: Gate, a: Mapping[str, float]) -> Gate:
    """Replace the rotation generator P by P + sum_k a_k P_k.

    The gate stays exactly unitary; the perturbation operator norm is capped
    to keep the coherent error small.
    """
    if not g.is_parameterized:
        raise ValueError("only rotation gates can carry control noise")
    n = g.generator.n
    items = tuple((letters, float(coeff)) for letters, coeff in a.items())
    for letters, _ in items:
        if len(letters) != n:
            raise DimensionMismatchError(
                f"perturbation string {letters!r} has wrong length for n={n}"
            )
    if items:
        pert = sum(coeff * _pauli_matrix(letters) for letters, coeff in items)
        norm = float(np.linalg.norm(pert, 2))
        if norm >= CONTROL_NOISE_NORM_CAP:
            raise ValueError(
                f"perturbation norm {norm:.3f} exceeds cap {CONTROL_NOISE_NORM_CAP}"
            )
    return replace(g, perturbation=items or None)


@dataclass(frozen=True)
class RandomUnitaryNoise:
    """Mixture {p_k, exp(-i theta P_k / 2)} sharing the gate's angle."""

    probs: tuple[float, ...]
    generators: tuple[str, ...]  # Pauli letter strings, full register length
    intended: int  # index of the intended rotation axis

    def __post_init__(self):
        if len(self.probs) != len(self.generators):
            raise ValueError("probs and generators length mismatch")
        if abs(sum(self.probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {sum(self.probs)!r}, not 1")
        if any(p < 0 for p in self.probs):
            raise ValueError("negative probability")
        if self.probs[self.intended] < max(self.probs):
            raise ValueError("intended rotation must carry the dominant weight")


def random_unitary_channel(
    spec: RandomUnitaryNoise, theta: float, n: int
) -> KrausChannel:
    """Kraus form {sqrt(p_k) exp(-i theta P_k / 2)} of the mixture."""
    ops = []
    d = 2**n
    for p, letters in zip(spec.probs, spec.generators):
        pm = _pauli_matrix(letters)
        u = np.cos(theta / 2) * np.eye(d, dtype=complex) - 1j * np.sin(theta / 2) * pm
        ops.append(np.sqrt(p) * u)
    return KrausChannel(n=n, kraus_ops=tuple(ops))


LayerChannel = KrausChannel | Sequence[KrausChannel] | None


@dataclass(frozen=True)
class NoiseSpec:
    """Noise placement: per-layer channels plus optional gate-level noise.

    ``layer_channels`` is one entry broadcast to all layers or a per-layer
    sequence; each entry is None, a single-qubit channel applied to every
    qubit, a full-register channel, or a per-qubit sequence of single-qubit
    channels.
    """

    layer_channels: LayerChannel | tuple[LayerChannel, ...] = None
    control_noise: Mapping[Location, Mapping[str, float]] | None = None
    random_unitary: Mapping[Location, RandomUnitaryNoise] | None = None

    @classmethod
    def none(cls) -> "NoiseSpec":
        return cls()

    @classmethod
    def uniform(cls, channel: KrausChannel) -> "NoiseSpec":
        return cls(layer_channels=channel)

    def channel_for_layer(self, layer: int) -> LayerChannel:
        lc = self.layer_channels
        if isinstance(lc, tuple) and not isinstance(lc, KrausChannel):
            return lc[layer] if layer < len(lc) else None
        return lc

    def has_gate_noise(self) -> bool:
        return bool(self.control_noise) or bool(self.random_unitary)


@dataclass(frozen=True)
class Circuit:
    """Layered ansatz; every rotation gate owns one flat parameter index."""

    n: int
    layers: tuple[tuple[Gate, ...], ...]
    parameter_index: Mapping[Location, int]

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def num_parameters(self) -> int:
        return len(self.parameter_index)

    def gate_at(self, location: Location) -> Gate:
        layer, slot = location
        return self.layers[layer][slot]

    def parameterized_locations(self) -> list[Location]:
        return sorted(self.parameter_index, key=lambda loc: self.parameter_index[loc])


def build_two_local(n: int, depth: int) -> Circuit:
    """RY column followed by an open-boundary CNOT chain, repeated ``depth`` times."""
    if n < 2:
        raise ValueError(f"two-local ansatz needs n >= 2, got {n}")
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    layers = []
    index: dict[Location, int] = {}
    for layer in range(depth):
        gates = []
        for q in range(n):
            loc = (layer, q)
            gates.append(ry_gate(q, n, loc))
            index[loc] = layer * n + q
        for q in range(n - 1):
            gates.append(cnot_gate(q, q + 1, n, (layer, n + q)))
        layers.append(tuple(gates))
    return Circuit(n=n, layers=tuple(layers), parameter_index=index)


def single_ry_circuit() -> Circuit:
    """One qubit, one RY gate: the minimal analytic test case."""
    loc = (0, 0)
    return Circuit(
        n=1, layers=((ry_gate(0, 1, loc),),), parameter_index={loc: 0}
    )


# ---------------------------------------------------------------------------
# State evolution
# ---------------------------------------------------------------------------


def _apply_unitary(rho: np.ndarray, u: np.ndarray) -> np.ndarray:
    return u @ rho @ u.conj().T


def _apply_channel_full(rho: np.ndarray, ch: KrausChannel) -> np.ndarray:
    return ch.apply(rho)


def _apply_channel_1q(
    rho: np.ndarray, kraus_ops: Sequence[np.ndarray], qubit: int, n: int
) -> np.ndarray:
    a = 2**qubit
    b = 2 ** (n - qubit - 1)
    t = rho.reshape(a, 2, b, a, 2, b)
    out = np.zeros_like(t)
    for k in kraus_ops:
        out += np.einsum("ip,apbcqd,jq->aibcjd", k, t, k.conj())
    return out.reshape(rho.shape)


def _apply_layer_channel(rho: np.ndarray, entry: LayerChannel, n: int) -> np.ndarray:
    if entry is None:
        return rho
    if isinstance(entry, KrausChannel):
        if entry.n == n:
            return _apply_channel_full(rho, entry)
        if entry.n == 1:
            for q in range(n):
                rho = _apply_channel_1q(rho, entry.kraus_ops, q, n)
            return rho
        raise DimensionMismatchError(
            f"layer channel acts on {entry.n} qubits, register has {n}"
        )
    # per-qubit sequence
    if len(entry) != n:
        raise DimensionMismatchError(
            f"per-qubit channel list has length {len(entry)}, register has {n}"
        )
    for q, ch in enumerate(entry):
        rho = _apply_channel_1q(rho, ch.kraus_ops, q, n)
    return rho


def evolve(
    circ: Circuit,
    theta: np.ndarray,
    noise: NoiseSpec | None = None,
    rho0: DensityMatrix | None = None,
    *,
    insert_before: Mapping[Location, np.ndarray] | None = None,
    override_gates: Mapping[Location, Gate] | None = None,
) -> DensityMatrix:
    """Run the noisy circuit: per layer, all gates then the layer channel.

    ``insert_before`` applies extra unitaries to the state just before the
    named gate; ``override_gates`` swaps out gates entirely.  Both hooks
    exist for shift-rule gradient evaluation.
    """
    noise = noise or NoiseSpec.none()
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (circ.num_parameters,):
        raise ValueError(
            f"expected {circ.num_parameters} parameters, got {theta.shape}"
        )
    rho0 = rho0 or DensityMatrix.ground_state(circ.n)
    if rho0.n != circ.n:
        raise DimensionMismatchError(f"state n={rho0.n}, circuit n={circ.n}")
    n = circ.n
    d = 2**n
    rho = np.array(rho0.data)
    control = noise.control_noise or {}
    mixtures = noise.random_unitary or {}
    insert_before = insert_before or {}
    override_gates = override_gates or {}

    for layer_idx, layer in enumerate(circ.layers):
        acc: np.ndarray | None = None

        def flush(rho_in, acc_in):
            return (_apply_unitary(rho_in, acc_in), None) if acc_in is not None else (rho_in, None)

        for gate in layer:
            loc = gate.location
            if loc in insert_before:
                rho, acc = flush(rho, acc)
                rho = _apply_unitary(rho, insert_before[loc])
            if loc in override_gates:
                gate = override_gates[loc]
            elif gate.is_parameterized and loc in control:
                gate = perturbed_gate(gate, control[loc])

            if gate.is_parameterized:
                angle = theta[circ.parameter_index[loc]]
                if loc in mixtures and loc not in override_gates:
                    rho, acc = flush(rho, acc)
                    ch = random_unitary_channel(mixtures[loc], angle, n)
                    rho = _apply_channel_full(rho, ch)
                    continue
                u = gate.unitary(angle)
            else:
                u = gate.matrix
            acc = u if acc is None else u @ acc
        rho, acc = flush(rho, acc)
        rho = _apply_layer_channel(rho, noise.channel_for_layer(layer_idx), n)

    return DensityMatrix(n=n, data=rho)


# ---------------------------------------------------------------------------
# Affine (coherence-vector) view of one layer, for bound evaluation
# ---------------------------------------------------------------------------


def layer_unitary(
    circ: Circuit,
    theta: np.ndarray,
    layer: int,
    noise: NoiseSpec | None = None,
) -> np.ndarray:
    """Product of all gate unitaries in a layer (control noise included)."""
    noise = noise or NoiseSpec.none()
    if noise.random_unitary and any(
        loc[0] == layer for loc in noise.random_unitary
    ):
        raise ValueError("layer containing a unitary mixture is not unitary")
    control = noise.control_noise or {}
    u = np.eye(2**circ.n, dtype=complex)
    for gate in circ.layers[layer]:
        if gate.is_parameterized and gate.location in control:
            gate = perturbed_gate(gate, control[gate.location])
        if gate.is_parameterized:
            g = gate.unitary(theta[circ.parameter_index[gate.location]])
        else:
            g = gate.matrix
        u = g @ u
    return u


def layer_channel_as_kraus(noise: NoiseSpec, layer: int, n: int) -> KrausChannel:
    """The layer's noise map as one full-register channel (identity if absent)."""
    from .channels import compose, identity_channel, tensor_channel

    entry = noise.channel_for_layer(layer)
    if entry is None:
        return identity_channel(n)
    if isinstance(entry, KrausChannel):
        if entry.n == n:
            return entry
        return tensor_channel([entry] * n)
    return tensor_channel(list(entry))

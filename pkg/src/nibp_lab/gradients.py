"""Cost-function derivatives under noise via the parameter-shift rule.

The two-point rule 0.5 * [C(theta + pi/2) - C(theta - pi/2)] stays exact
under per-layer CPTP noise and under random-unitary gate noise (every
mixture branch shares the angle).  Under control noise the generator gains
extra Pauli terms, and the derivative becomes a weighted sum of shifted
evaluations, one per generator term, with the pi/2 rotation inserted just
before the noisy gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .circuits import (
    Circuit,
    Gate,
    Location,
    NoiseSpec,
    RandomUnitaryNoise,
    evolve,
)
from .hamiltonians import Hamiltonian, cost, h_norm, random_two_local
from .pauli import DensityMatrix, PauliString, _pauli_matrix


@dataclass(frozen=True)
class GradientSample:
    location: Location
    theta: np.ndarray
    value: float
    method: str  # psr | finite_difference | coherence_overlap


@dataclass(frozen=True)
class GradientStats:
    """Statistics of |dC/dtheta| at one gate location."""

    location: Location
    mean_abs: float
    variance: float
    min: float
    max: float
    samples: int


def _shifted(theta: np.ndarray, idx: int, delta: float) -> np.ndarray:
    out = np.array(theta, dtype=float)
    out[idx] += delta
    return out


def _cost(circ, theta, noise, H, rho0=None, **hooks) -> float:
    return cost(H, evolve(circ, theta, noise, rho0, **hooks))


def psr_gradient(
    circ: Circuit,
    theta: np.ndarray,
    noise: NoiseSpec | None,
    H: Hamiltonian,
    location: Location,
    rho0: DensityMatrix | None = None,
) -> float:
    """Two-point shift-rule derivative with the full noisy evolution."""
    gate = circ.gate_at(location)
    if not gate.is_parameterized:
        raise ValueError(f"gate at {location} carries no parameter")
    idx = circ.parameter_index[location]
    cp = _cost(circ, _shifted(theta, idx, np.pi / 2), noise, H, rho0)
    cm = _cost(circ, _shifted(theta, idx, -np.pi / 2), noise, H, rho0)
    return 0.5 * (cp - cm)


def fd_gradient(
    circ: Circuit,
    theta: np.ndarray,
    noise: NoiseSpec | None,
    H: Hamiltonian,
    location: Location,
    step: float = 1e-5,
    rho0: DensityMatrix | None = None,
) -> float:
    """Central finite difference, the numerical oracle for the shift rule."""
    if not 1e-7 <= step <= 1e-3:
        raise ValueError(f"step {step} outside [1e-7, 1e-3]")
    idx = circ.parameter_index[location]
    cp = _cost(circ, _shifted(theta, idx, step), noise, H, rho0)
    cm = _cost(circ, _shifted(theta, idx, -step), noise, H, rho0)
    return (cp - cm) / (2.0 * step)


def coherence_gradient(
    circ: Circuit,
    theta: np.ndarray,
    noise: NoiseSpec | None,
    H: Hamiltonian,
    location: Location,
    rho0: DensityMatrix | None = None,
) -> float:
    """|derivative| as half the overlap of (v+ - v-) with h.

    The identity component of H drops out of the difference of the two
    shifted states, so the overlap reproduces the shift-rule value.
    """
    if circ.n > 3:
        raise ValueError("explicit coherence path limited to n <= 3")
    from .hamiltonians import h_vector
    from .pauli import build_nice_basis, to_coherence

    basis = build_nice_basis(circ.n)
    _, h = h_vector(H, basis)
    idx = circ.parameter_index[location]
    vp = to_coherence(
        evolve(circ, _shifted(theta, idx, np.pi / 2), noise, rho0), basis
    ).v
    vm = to_coherence(
        evolve(circ, _shifted(theta, idx, -np.pi / 2), noise, rho0), basis
    ).v
    return abs(0.5 * float((vp - vm) @ h))


def _pi_half_insertion(letters: str, sign: float) -> np.ndarray:
    """exp(-i (sign * pi/2) P / 2) on the full register."""
    p = _pauli_matrix(letters)
    d = p.shape[0]
    s = np.sqrt(0.5)
    return s * np.eye(d, dtype=complex) - 1j * sign * s * p


def control_noise_gradient(
    circ: Circuit,
    theta: np.ndarray,
    a: Mapping[str, float],
    H: Hamiltonian,
    location: Location,
    noise: NoiseSpec | None = None,
    rho0: DensityMatrix | None = None,
) -> tuple[float, float]:
    """Exact derivative and its norm bound for a coherently perturbed gate.

    The gate at ``location`` has generator P_j + sum_k a_k P_k.  Since the
    generator commutes with its own exponential, the derivative splits into
    per-term commutators acting on the pre-gate state, each realized by a
    +-pi/2 rotation inserted before the gate:

        dC/dtheta = 1/2 sum_k (delta_kj + a_k) [C_k(+) - C_k(-)].

    Returns (value, bound) with
    bound = ||h||/2 * (||w_j|| + sum_k |a_k| ||w_k||), where w_k is the
    coherence-vector difference of the two inserted branches and its norm
    is taken as the Frobenius norm of the state difference.
    """
    base = noise or NoiseSpec.none()
    control = dict(base.control_noise or {})
    control[location] = dict(a)
    full = NoiseSpec(
        layer_channels=base.layer_channels,
        control_noise=control,
        random_unitary=base.random_unitary,
    )
    gen = circ.gate_at(location).generator.letters
    hn = h_norm(H)

    weights: dict[str, float] = {gen: 1.0}
    for letters, coeff in a.items():
        weights[letters] = weights.get(letters, 0.0) + float(coeff)

    value = 0.0
    w_norms: dict[str, float] = {}
    for letters in weights:
        rp = evolve(
            circ, theta, full, rho0,
            insert_before={location: _pi_half_insertion(letters, +1.0)},
        )
        rm = evolve(
            circ, theta, full, rho0,
            insert_before={location: _pi_half_insertion(letters, -1.0)},
        )
        diff = rp.data - rm.data
        w_norms[letters] = float(np.linalg.norm(diff))
        value += weights[letters] * 0.5 * float(
            np.real(np.trace(H.matrix() @ diff))
        )

    bound = 0.5 * hn * w_norms[gen]
    for letters, coeff in a.items():
        bound += 0.5 * abs(coeff) * hn * w_norms[letters]
    return value, bound


def random_noise_gradient(
    circ: Circuit,
    theta: np.ndarray,
    spec: RandomUnitaryNoise,
    H: Hamiltonian,
    location: Location,
    noise: NoiseSpec | None = None,
    rho0: DensityMatrix | None = None,
) -> tuple[float, float]:
    """Exact derivative and its bound for a gate replaced by a unitary mixture.

    All mixture branches rotate by the same angle, so the plain two-point
    rule is exact on the mixed channel.  The bound is
    p_j |dC_ideal| + ||h||/2 * sum_{k != j} p_k ||w_k||, where w_k comes
    from replacing the gate by a P_k rotation at angles theta +- pi/2.
    """
    base = noise or NoiseSpec.none()
    mixtures = dict(base.random_unitary or {})
    mixtures[location] = spec
    full = NoiseSpec(
        layer_channels=base.layer_channels,
        control_noise=base.control_noise,
        random_unitary=mixtures,
    )
    idx = circ.parameter_index[location]
    value = psr_gradient(circ, theta, full, H, location, rho0)

    # ideal derivative: the same circuit without the mixture at this gate
    ideal_grad = psr_gradient(circ, theta, base, H, location, rho0)
    hn = h_norm(H)
    bound = spec.probs[spec.intended] * abs(ideal_grad)
    original = circ.gate_at(location)
    for k, (p_k, letters) in enumerate(zip(spec.probs, spec.generators)):
        if k == spec.intended or p_k == 0.0:
            continue
        branch = Gate(
            kind="param",
            location=location,
            target_qubits=original.target_qubits,
            generator=PauliString(letters),
        )
        rp = evolve(
            circ, _shifted(theta, idx, np.pi / 2), base, rho0,
            override_gates={location: branch},
        )
        rm = evolve(
            circ, _shifted(theta, idx, -np.pi / 2), base, rho0,
            override_gates={location: branch},
        )
        bound += 0.5 * p_k * hn * float(np.linalg.norm(rp.data - rm.data))
    return value, bound


@dataclass(frozen=True)
class SweepSpec:
    """Sampling plan for gradient statistics at fixed circuit geometry."""

    circuit: Circuit
    noise: NoiseSpec
    locations: tuple[Location, ...]
    num_hamiltonians: int = 50
    thetas_per_hamiltonian: int = 20
    seed: int = 0
    hamiltonian_factory: Callable[[np.random.Generator], Hamiltonian] | None = None


def default_locations(circ: Circuit) -> tuple[Location, Location, Location]:
    """First, middle, and last layer angle on qubit 0."""
    mid = circ.depth // 2
    return ((0, 0), (mid, 0), (circ.depth - 1, 0))


def gradient_stats(spec: SweepSpec) -> dict[Location, GradientStats]:
    """|dC/dtheta| statistics over random Hamiltonians and angle draws."""
    if not spec.locations:
        raise ValueError("sweep lists no locations")
    circ = spec.circuit
    factory = spec.hamiltonian_factory or (
        lambda rng: random_two_local(circ.n, rng)
    )
    values: dict[Location, list[float]] = {loc: [] for loc in spec.locations}
    for i in range(spec.num_hamiltonians):
        rng = np.random.default_rng([spec.seed, i])
        H = factory(rng)
        for _ in range(spec.thetas_per_hamiltonian):
            theta = rng.uniform(0.0, 2.0 * np.pi, size=circ.num_parameters)
            for loc in spec.locations:
                values[loc].append(
                    abs(psr_gradient(circ, theta, spec.noise, H, loc))
                )
    out = {}
    for loc, vals in values.items():
        k = len(vals)
        mean = math.fsum(vals) / k
        var = math.fsum((x - mean) ** 2 for x in vals) / k
        out[loc] = GradientStats(
            location=loc,
            mean_abs=mean,
            variance=var,
            min=min(vals),
            max=max(vals),
            samples=k,
        )
    return out

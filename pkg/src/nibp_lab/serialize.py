"""JSON forms of Hamiltonians, circuits, noise specs, and Kraus channels."""

from __future__ import annotations

from typing import Any

import numpy as np

from .channels import KrausChannel, named_channel
from .circuits import Circuit, NoiseSpec, build_two_local
from .hamiltonians import Hamiltonian


def hamiltonian_to_json(H: Hamiltonian) -> dict[str, Any]:
    return {
        "n": H.n,
        "terms": [{"pauli": s, "coeff": float(c)} for s, c in H.terms],
        "h0": float(H.h0),
    }


def hamiltonian_from_json(data: dict[str, Any]) -> Hamiltonian:
    return Hamiltonian(
        n=int(data["n"]),
        terms=tuple((t["pauli"], float(t["coeff"])) for t in data["terms"]),
        h0=float(data.get("h0", 0.0)),
    )


def noise_from_json(data: dict[str, Any] | None) -> NoiseSpec:
    """Per-layer noise from {type, p, placement}; placement defaults to
    every layer."""
    if not data or data.get("type") in (None, "none"):
        return NoiseSpec.none()
    ch = named_channel(data["type"], float(data.get("p", 0.0)))
    placement = data.get("placement", "per_layer")
    if placement != "per_layer":
        raise ValueError(f"unsupported noise placement: {placement!r}")
    return NoiseSpec.uniform(ch)


def circuit_from_json(data: dict[str, Any]) -> tuple[Circuit, NoiseSpec]:
    ansatz = data.get("ansatz", "two_local")
    if ansatz != "two_local":
        raise ValueError(f"unsupported ansatz: {ansatz!r}")
    circ = build_two_local(int(data["n"]), int(data["L"]))
    return circ, noise_from_json(data.get("noise"))


def circuit_to_json(
    circ: Circuit, noise_type: str = "none", p: float = 0.0
) -> dict[str, Any]:
    return {
        "n": circ.n,
        "L": circ.depth,
        "ansatz": "two_local",
        "noise": {"type": noise_type, "p": p, "placement": "per_layer"},
    }


def kraus_from_json(data: dict[str, Any]) -> KrausChannel:
    """Channel from {name, p} or explicit {kraus: [[[re, im], ...], ...], n}.

    Explicit matrices are row-major lists of [re, im] pairs.
    """
    if "name" in data:
        return named_channel(data["name"], float(data.get("p", 0.0)))
    ops = []
    for mat in data["kraus"]:
        arr = np.array(mat, dtype=float)
        ops.append(arr[..., 0] + 1j * arr[..., 1])
    n = int(data.get("n", round(np.log2(ops[0].shape[0]))))
    return KrausChannel(n=n, kraus_ops=tuple(ops))


def kraus_to_json(ch: KrausChannel) -> dict[str, Any]:
    return {
        "n": ch.n,
        "kraus": [
            np.stack([k.real, k.imag], axis=-1).tolist() for k in ch.kraus_ops
        ],
    }

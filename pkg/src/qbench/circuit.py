"""Gate-level circuit IR and the Fourier-adder benchmark workload.

Bit-order convention (fixed for the whole package): qubit i carries the bit
of weight 2**i, so the integer encoded by a basis state is sum(bit_i << i).
Measurement strings are printed most-significant-bit first, i.e. qubit q-1
is the leftmost character and ``format(v, f"0{q}b")`` is the rendering of
basis state v.

The benchmark circuit for (q, n) has four segments:

  (a) X gates preparing |n> in binary,
  (b) the Fourier ladder: per qubit an H followed by controlled-phase
      couplings CP(2*pi / 2**k) from each lower qubit, then explicit
      terminal SWAPs reversing the register,
  (c) one P(2*pi * 2**i / 2**q) on each qubit i, which advances the
      encoded integer by one in the Fourier basis,
  (d) the exact mirror inverse of (b).

A noiseless run therefore concentrates all probability on (n+1) mod 2**q.
The terminal SWAPs are kept as real gates (not index relabeling) so that
two-qubit gate counts reflect what a hardware run would pay for.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable

from .rng import derive_seed, mix64


class GateKind(str, Enum):
    X = "x"
    H = "h"
    P = "p"
    RZ = "rz"
    RX = "rx"
    RY = "ry"
    CP = "cp"
    CX = "cx"
    ZZ = "zz"
    SWAP = "swap"


ONE_QUBIT_KINDS = frozenset(
    {GateKind.X, GateKind.H, GateKind.P, GateKind.RZ, GateKind.RX, GateKind.RY}
)
TWO_QUBIT_KINDS = frozenset({GateKind.CP, GateKind.CX, GateKind.ZZ, GateKind.SWAP})
PARAMETRIC_KINDS = frozenset(
    {GateKind.P, GateKind.RZ, GateKind.RX, GateKind.RY, GateKind.CP, GateKind.ZZ}
)


@dataclass(frozen=True)
class Gate:
    """One gate application. ``targets`` order matters for CX (control, target)."""

    kind: GateKind
    targets: tuple[int, ...]
    theta: float | None = None

    def __post_init__(self) -> None:
        want = 1 if self.kind in ONE_QUBIT_KINDS else 2
        if len(self.targets) != want:
            raise ValueError(f"{self.kind.value} expects {want} target(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"duplicate targets {self.targets}")
        if any(t < 0 for t in self.targets):
            raise ValueError(f"negative target in {self.targets}")
        if self.kind in PARAMETRIC_KINDS:
            if self.theta is None or not math.isfinite(self.theta):
                raise ValueError(f"{self.kind.value} requires a finite angle")
        elif self.theta is not None:
            raise ValueError(f"{self.kind.value} takes no angle")

    @property
    def arity(self) -> int:
        return len(self.targets)


@dataclass(frozen=True)
class GateCensus:
    """Gate totals split by arity."""

    n_1q: int
    n_2q: int

    @property
    def total(self) -> int:
        return self.n_1q + self.n_2q

    def as_dict(self) -> dict[str, int]:
        return {"n_1q": self.n_1q, "n_2q": self.n_2q, "total": self.total}


@dataclass(frozen=True)
class Circuit:
    """Immutable gate list on ``width`` qubits plus free-form metadata."""

    width: int
    gates: tuple[Gate, ...]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError("width must be >= 1")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.targets) >= self.width:
                raise ValueError(f"gate {g} out of range for width {self.width}")


def census(circuit: Circuit) -> GateCensus:
    n1 = sum(1 for g in circuit.gates if g.arity == 1)
    return GateCensus(n_1q=n1, n_2q=len(circuit.gates) - n1)


def ideal_output(q: int, n: int) -> str:
    """Expected measurement string of the benchmark: (n+1) mod 2**q, MSB first."""
    if not 0 <= n < (1 << q):
        raise ValueError(f"n={n} out of range for {q} qubits")
    return format((n + 1) % (1 << q), f"0{q}b")


def _fourier_ladder(q: int) -> list[Gate]:
    gates: list[Gate] = []
    for i in range(q - 1, -1, -1):
        gates.append(Gate(GateKind.H, (i,)))
        for j in range(i - 1, -1, -1):
            # coupling strength falls off with bit distance
            gates.append(Gate(GateKind.CP, (j, i), 2 * math.pi / 2 ** (i - j + 1)))
    for i in range(q // 2):
        gates.append(Gate(GateKind.SWAP, (i, q - 1 - i)))
    return gates


def inverse(gates: Iterable[Gate]) -> list[Gate]:
    """Mirror inverse: reversed order, negated angles. H/X/CX/SWAP are involutions."""
    out: list[Gate] = []
    for g in reversed(list(gates)):
        theta = None if g.theta is None else -g.theta
        out.append(Gate(g.kind, g.targets, theta))
    return out


def build_benchmark(q: int, n: int, *, seed: int | None = None) -> Circuit:
    """Build the q-qubit Fourier-adder benchmark on input n.

    Metadata records (q, n, seed) so downstream consumers can recover the
    analytic output distribution without re-simulating.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if not 0 <= n < (1 << q):
        raise ValueError(f"n={n} out of range for {q} qubits")
    gates: list[Gate] = [Gate(GateKind.X, (i,)) for i in range(q) if (n >> i) & 1]
    ladder = _fourier_ladder(q)
    gates += ladder
    gates += [Gate(GateKind.P, (i,), 2 * math.pi * (1 << i) / (1 << q)) for i in range(q)]
    gates += inverse(ladder)
    meta: dict[str, Any] = {"benchmark": "fourier_adder", "q": q, "n": n}
    if seed is not None:
        meta["seed"] = seed
    return Circuit(width=q, gates=tuple(gates), metadata=meta)


def random_input(q: int, seed: int) -> int:
    """Uniform integer in [0, 2**q), a pure function of (q, seed)."""
    if q < 1 or q > 63:
        raise ValueError("q out of supported range")
    return mix64(derive_seed("input", q, seed)) & ((1 << q) - 1)


# --- serialization -----------------------------------------------------------

def circuit_to_json(circuit: Circuit) -> str:
    gates = []
    for g in circuit.gates:
        entry: dict[str, Any] = {"kind": g.kind.value, "targets": list(g.targets)}
        if g.theta is not None:
            entry["theta"] = g.theta
        gates.append(entry)
    return json.dumps(
        {"width": circuit.width, "gates": gates, "metadata": circuit.metadata},
        sort_keys=True,
    )


def circuit_from_json(text: str) -> Circuit:
    obj = json.loads(text)
    gates = tuple(
        Gate(GateKind(e["kind"]), tuple(e["targets"]), e.get("theta"))
        for e in obj["gates"]
    )
    return Circuit(width=obj["width"], gates=gates, metadata=obj.get("metadata", {}))

"""Gate-level intermediate representation.

Qubit ``j`` holds bit ``j`` of the amplitude index (LSB convention).  A gate is
a base operation (``X``, ``H``, ``RY``, ``RZ``, ``PHASE``, ``U3``, ``SWAP``,
a dense ``UNITARY`` or a named ``BLOCK`` sub-circuit) plus an arbitrary list
of control qubits, so ``CX``/``MCX``/``CRY``/``CPHASE`` are all canonical
forms of the same record.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

BASE_KINDS = {"X", "H", "RY", "RZ", "PHASE", "U3", "SWAP", "UNITARY", "BLOCK"}
_N_PARAMS = {"X": 0, "H": 0, "SWAP": 0, "RY": 1, "RZ": 1, "PHASE": 1, "U3": 3, "UNITARY": 0, "BLOCK": 0}
_N_TARGETS = {"X": 1, "H": 1, "RY": 1, "RZ": 1, "PHASE": 1, "U3": 1, "SWAP": 2}
SELF_INVERSE = {"X", "H", "SWAP"}

# user-facing aliases -> (base kind, number of controls it implies)
_ALIASES = {"CX": ("X", 1), "MCX": ("X", None), "CRY": ("RY", 1), "CPHASE": ("PHASE", 1)}


class CircuitError(ValueError):
    """Invalid qubit indices or incompatible registers."""


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    params: tuple[float, ...] = ()
    matrix: np.ndarray | None = None
    body: "Circuit | None" = None
    label: str = ""
    ctrl_state: tuple[int, ...] = ()

    def __post_init__(self):
        kind = self.kind.upper()
        if kind in _ALIASES:
            base, nc = _ALIASES[kind]
            if nc is not None and len(self.controls) != nc:
                raise CircuitError(f"{kind} needs exactly {nc} control(s)")
            if kind == "MCX" and not self.controls:
                raise CircuitError("MCX needs at least one control")
            kind = base
        if kind not in BASE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        state = tuple(int(b) for b in self.ctrl_state)
        if state and len(state) != len(self.controls):
            raise CircuitError("ctrl_state length must match the controls")
        if any(b not in (0, 1) for b in state):
            raise CircuitError("ctrl_state entries must be 0 or 1")
        # all-ones is the default and is stored as ()
        object.__setattr__(self, "ctrl_state", () if all(state) else state)
        if len(self.params) != _N_PARAMS[kind]:
            raise CircuitError(f"{kind} takes {_N_PARAMS[kind]} angle(s), got {len(self.params)}")
        if kind in _N_TARGETS and len(self.targets) != _N_TARGETS[kind]:
            raise CircuitError(f"{kind} acts on {_N_TARGETS[kind]} target(s)")
        qs = self.targets + self.controls
        if len(set(qs)) != len(qs):
            raise CircuitError("controls and targets must be distinct qubits")
        if any(q < 0 for q in qs):
            raise CircuitError("negative qubit index")
        if kind == "UNITARY":
            mat = np.asarray(self.matrix, dtype=complex)
            if mat.shape != (2 ** len(self.targets),) * 2:
                raise CircuitError("UNITARY matrix shape does not match its targets")
            object.__setattr__(self, "matrix", mat)
        if kind == "BLOCK":
            if self.body is None or self.body.num_qubits != len(self.targets):
                raise CircuitError("BLOCK body width must equal the number of targets")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    @property
    def control_values(self) -> tuple[int, ...]:
        return self.ctrl_state or (1,) * len(self.controls)

    @property
    def name(self) -> str:
        nc = len(self.controls)
        if self.kind == "BLOCK":
            base = self.label or "block"
        else:
            base = self.kind
        if nc == 0:
            return base
        if self.kind == "X":
            return "CX" if nc == 1 else "MCX"
        return ("C" if nc == 1 else f"C{nc}") + base

    def _derive(self, targets, controls, params, ctrl_state, matrix=None, body=None) -> "Gate":
        """Copy with new wiring; skips the checks that cannot fail for a derived gate."""
        qs = targets + controls
        if len(set(qs)) != len(qs):
            raise CircuitError("controls and targets must be distinct qubits")
        if qs and min(qs) < 0:
            raise CircuitError("negative qubit index")
        if ctrl_state:
            if len(ctrl_state) != len(controls):
                raise CircuitError("ctrl_state length must match the controls")
            if all(ctrl_state):
                ctrl_state = ()
        g = object.__new__(Gate)
        for name, value in (
            ("kind", self.kind),
            ("targets", targets),
            ("controls", controls),
            ("params", params),
            ("matrix", self.matrix if matrix is None else matrix),
            ("body", self.body if body is None else body),
            ("label", self.label),
            ("ctrl_state", ctrl_state),
        ):
            object.__setattr__(g, name, value)
        return g

    def relabel(self, mapping: Sequence[int] | dict[int, int]) -> "Gate":
        return self._derive(
            tuple(int(mapping[q]) for q in self.targets),
            tuple(int(mapping[q]) for q in self.controls),
            self.params,
            self.ctrl_state,
        )

    def with_controls(self, extra: Iterable[int], values: Iterable[int] | None = None) -> "Gate":
        extra = tuple(int(q) for q in extra)
        vals = (1,) * len(extra) if values is None else tuple(int(v) for v in values)
        if any(v not in (0, 1) for v in vals):
            raise CircuitError("ctrl_state entries must be 0 or 1")
        state = vals + self.control_values if (self.ctrl_state or 0 in vals) else ()
        return self._derive(self.targets, extra + self.controls, self.params, state)

    def inverse(self) -> "Gate":
        cs = self.ctrl_state
        if self.kind in SELF_INVERSE:
            return self
        if self.kind in ("RY", "RZ", "PHASE"):
            return self._derive(self.targets, self.controls, (-self.params[0],), cs)
        if self.kind == "U3":
            theta, phi, lam = self.params
            return self._derive(self.targets, self.controls, (-theta, -lam, -phi), cs)
        if self.kind == "UNITARY":
            return self._derive(self.targets, self.controls, (), cs, matrix=self.matrix.conj().T)
        label = self.label[:-3] if self.label.endswith("_dg") else self.label + "_dg"
        return Gate("BLOCK", self.targets, self.controls, body=inverse(self.body), label=label, ctrl_state=cs)

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        if (self.kind, self.targets, self.controls, self.params, self.label, self.ctrl_state) != (
            other.kind,
            other.targets,
            other.controls,
            other.params,
            other.label,
            other.ctrl_state,
        ):
            return False
        if self.kind == "UNITARY":
            return bool(np.array_equal(self.matrix, other.matrix))
        if self.kind == "BLOCK":
            return self.body == other.body
        return True

    def __hash__(self):
        return hash((self.kind, self.targets, self.controls, self.params, self.label))

    def __repr__(self):
        args = ", ".join(f"{p:.6g}" for p in self.params)
        ctrl = f" c={list(self.controls)}" if self.controls else ""
        if self.ctrl_state:
            ctrl += f" s={list(self.ctrl_state)}"
        return f"{self.name}({args}) t={list(self.targets)}{ctrl}"


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    global_phase: float = 0.0

    def __post_init__(self):
        if self.num_qubits < 0:
            raise CircuitError("num_qubits must be non-negative")
        gates = tuple(self.gates)
        for g in gates:
            if max(g.qubits) >= self.num_qubits:
                raise CircuitError(f"{g!r} touches a qubit outside [0, {self.num_qubits})")
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "global_phase", float(self.global_phase) % (2 * np.pi))

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def count_ops(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.name] = out.get(g.name, 0) + 1
        return out

    def listing(self) -> str:
        """Neutral pseudo-assembly, one gate per line."""
        lines = [f"qubits {self.num_qubits}", f"global_phase {self.global_phase!r}"]
        for g in self.gates:
            lines.append(_listing_line(g))
        return "\n".join(lines)


def _listing_line(g: Gate) -> str:
    parts = [g.name.lower()]
    if g.params:
        parts.append("(" + ", ".join(repr(p) for p in g.params) + ")")
    if g.controls:
        parts.append("ctrl " + ",".join(map(str, g.controls)))
    if g.ctrl_state:
        parts.append("state " + "".join(map(str, g.ctrl_state)))
    parts.append("on " + ",".join(map(str, g.targets)))
    return " ".join(parts)


def empty(num_qubits: int) -> Circuit:
    return Circuit(num_qubits)


def append(circuit: Circuit, gate: Gate) -> Circuit:
    return Circuit(circuit.num_qubits, circuit.gates + (gate,), circuit.global_phase)


def compose(first: Circuit, second: Circuit) -> Circuit:
    """Run ``first`` then ``second`` on the same register."""
    if first.num_qubits != second.num_qubits:
        raise CircuitError("cannot compose circuits of different widths")
    return Circuit(first.num_qubits, first.gates + second.gates, first.global_phase + second.global_phase)


def inverse(circuit: Circuit) -> Circuit:
    return Circuit(
        circuit.num_qubits,
        tuple(g.inverse() for g in reversed(circuit.gates)),
        -circuit.global_phase,
    )


def relabel(circuit: Circuit, mapping: Sequence[int], total_qubits: int) -> Circuit:
    """Move qubit ``q`` of ``circuit`` to ``mapping[q]`` in a ``total_qubits`` register."""
    if len(mapping) != circuit.num_qubits or len(set(mapping)) != len(mapping):
        raise CircuitError("mapping must be injective over the circuit's qubits")
    if any(not 0 <= q < total_qubits for q in mapping):
        raise CircuitError("mapping leaves the target register")
    return Circuit(total_qubits, tuple(g.relabel(mapping) for g in circuit.gates), circuit.global_phase)


def controlled(
    circuit: Circuit,
    ctrl_qubits: Sequence[int],
    total_qubits: int,
    target_map: Sequence[int] | None = None,
    ctrl_state: Sequence[int] | None = None,
) -> Circuit:
    """Apply ``circuit`` conditioned on ``ctrl_qubits``.

    The embedded circuit lands on ``target_map`` (default: qubits ``0..n-1``).
    Its global phase becomes a PHASE on the control set, so the block applies
    ``exp(i*phase) * U`` exactly when the controls match ``ctrl_state``
    (default all ones); zero bits of the state are sandwiched in X gates.
    """
    ctrl_qubits = tuple(int(c) for c in ctrl_qubits)
    if target_map is None:
        target_map = tuple(range(circuit.num_qubits))
    if set(ctrl_qubits) & set(target_map):
        raise CircuitError("control register overlaps the controlled circuit")
    if len(set(ctrl_qubits)) != len(ctrl_qubits):
        raise CircuitError("duplicate control qubits")
    inner = relabel(circuit, target_map, total_qubits)
    if ctrl_state is None:
        ctrl_state = (1,) * len(ctrl_qubits)
    if len(ctrl_state) != len(ctrl_qubits):
        raise CircuitError("ctrl_state length must match ctrl_qubits")
    flips = tuple(Gate("X", (c,)) for c, s in zip(ctrl_qubits, ctrl_state) if not s)
    body = [g.with_controls(ctrl_qubits) for g in inner.gates]
    if not ctrl_qubits:
        return Circuit(total_qubits, tuple(body), inner.global_phase)
    phase = inner.global_phase
    if phase != 0.0:
        body.insert(0, Gate("PHASE", (ctrl_qubits[-1],), ctrl_qubits[:-1], (phase,)))
    return Circuit(total_qubits, flips + tuple(body) + flips, 0.0)


def tensor_embed(components: Sequence[tuple[Circuit, int]], total_qubits: int) -> Circuit:
    """Place each circuit on ``[offset, offset + width)``; registers must not overlap."""
    used: set[int] = set()
    gates: list[Gate] = []
    phase = 0.0
    for circ, offset in components:
        span = set(range(offset, offset + circ.num_qubits))
        if offset < 0 or offset + circ.num_qubits > total_qubits:
            raise CircuitError("component register exceeds total width")
        if span & used:
            raise CircuitError("overlapping component registers")
        used |= span
        mapping = list(range(offset, offset + circ.num_qubits))
        gates.extend(g.relabel(mapping) for g in circ.gates)
        phase += circ.global_phase
    return Circuit(total_qubits, tuple(gates), phase)


def block(circuit: Circuit, qubits: Sequence[int], label: str) -> Gate:
    """Wrap a sub-circuit as one named instruction acting on ``qubits``."""
    return Gate("BLOCK", tuple(qubits), body=circuit, label=label)


def flatten(circuit: Circuit) -> Circuit:
    """Inline every BLOCK; the result contains no sub-circuits."""
    gates: list[Gate] = []
    phase = circuit.global_phase
    for g in circuit.gates:
        if g.kind != "BLOCK":
            gates.append(g)
            continue
        inner = flatten(g.body)
        sub = controlled(inner, g.controls, circuit.num_qubits, target_map=g.targets, ctrl_state=g.control_values)
        gates.extend(sub.gates)
        phase += sub.global_phase
    return Circuit(circuit.num_qubits, tuple(gates), phase)

"""OpenQASM 2.0 output for {CX, U3} circuits."""

from __future__ import annotations

from .circuit import Circuit
from .transpile import transpile

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";'


def _num(x: float) -> str:
    return format(float(x), ".17g")


def to_qasm(circuit: Circuit, register: str = "q") -> str:
    """Transpile (if needed) and print; u3 is defined up to a global phase, which goes in a comment."""
    basis = transpile(circuit)
    lines = [HEADER, f"// global_phase {_num(basis.global_phase)}", f"qreg {register}[{basis.num_qubits}];"]
    for g in basis.gates:
        if g.kind == "U3":
            args = ",".join(_num(p) for p in g.params)
            lines.append(f"u3({args}) {register}[{g.targets[0]}];")
        else:
            lines.append(f"cx {register}[{g.controls[0]}],{register}[{g.targets[0]}];")
    return "\n".join(lines) + "\n"

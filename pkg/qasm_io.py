"""
OpenQASM 2.0 export and import for circuits over {ry, p, cp, x, h}.

Angles are written with 17 significant digits, which parse back to the
same float, and gate labels travel as trailing `// label` comments, so an
export followed by an import reproduces the gate list exactly.
"""

import logging
import math
import re
from typing import Optional

from circuit_builder import Circuit
from errors import QasmParseError
from statevector import GateOp

logger = logging.getLogger(__name__)

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'

QREG_PATTERN = re.compile(r"^qreg\s+q\s*\[\s*(\d+)\s*\]\s*;$")
GATE_PATTERN = re.compile(
    r"^(?P<name>ry|p|cp|x|h)\s*(?:\(\s*(?P<angle>[^)]*?)\s*\))?\s+"
    r"(?P<args>q\s*\[\s*\d+\s*\](?:\s*,\s*q\s*\[\s*\d+\s*\])?)\s*;$"
)
QUBIT_PATTERN = re.compile(r"q\s*\[\s*(\d+)\s*\]")
PI_PATTERN = re.compile(r"^(?P<sign>-)?(?:(?P<coef>\d+(?:\.\d*)?)\s*\*\s*)?pi(?:\s*/\s*(?P<div>\d+(?:\.\d*)?))?$")


def _format_angle(angle: float) -> str:
    # 17 significant digits, trailing zeros kept; float() reads it back bit for bit
    return f"{float(angle):#.17g}"


def export_qasm(circuit: Circuit) -> str:
    lines = [HEADER + f"qreg q[{circuit.n_qubits}];"]
    for gate in circuit.gates:
        if gate.kind == 'cp':
            text = f"cp({_format_angle(gate.angle)}) q[{gate.qubits[0]}],q[{gate.qubits[1]}];"
        elif gate.angle is not None:
            text = f"{gate.kind}({_format_angle(gate.angle)}) q[{gate.qubits[0]}];"
        else:
            text = f"{gate.kind} q[{gate.qubits[0]}];"
        if gate.label:
            text += f" // {gate.label}"
        lines.append(text)
    return '\n'.join(lines) + '\n'


def _parse_angle(text: str, line_no: int) -> float:
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    match = PI_PATTERN.match(text)
    if not match:
        raise QasmParseError(f"Cannot parse angle '{text}'", line_no)
    value = math.pi * float(match.group('coef') or 1.0)
    if match.group('div'):
        value /= float(match.group('div'))
    return -value if match.group('sign') else value


def _split_comment(line: str):
    if '//' in line:
        code, comment = line.split('//', 1)
        return code.strip(), comment.strip() or None
    return line.strip(), None


def import_qasm(text: str) -> Circuit:
    """
    Parse OpenQASM 2.0 text written by export_qasm (or hand-written in the
    same gate subset, with angles as numbers or simple multiples of pi).

    Raises:
        QasmParseError: with the offending line number
    """
    n_qubits: Optional[int] = None
    gates = []
    seen_header = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        code, comment = _split_comment(raw)
        if not code:
            continue
        if code.startswith('OPENQASM'):
            if code.replace(' ', '') != 'OPENQASM2.0;':
                raise QasmParseError(f"Unsupported version: {code}", line_no)
            seen_header = True
            continue
        if code.startswith('include'):
            continue

        match = QREG_PATTERN.match(code)
        if match:
            if n_qubits is not None:
                raise QasmParseError("Only one quantum register is supported", line_no)
            n_qubits = int(match.group(1))
            continue

        match = GATE_PATTERN.match(code)
        if not match:
            raise QasmParseError(f"Unsupported statement: {code}", line_no)
        if n_qubits is None:
            raise QasmParseError("Gate before qreg declaration", line_no)

        name = match.group('name')
        qubits = [int(q) for q in QUBIT_PATTERN.findall(match.group('args'))]
        angle_text = match.group('angle')
        arity = 2 if name == 'cp' else 1
        if len(qubits) != arity:
            raise QasmParseError(f"'{name}' takes {arity} qubit(s), got {len(qubits)}", line_no)
        if any(q >= n_qubits for q in qubits):
            raise QasmParseError(f"Qubit index out of range for qreg q[{n_qubits}]", line_no)
        parametric = name in ('ry', 'p', 'cp')
        if parametric != (angle_text is not None):
            raise QasmParseError(f"'{name}' angle mismatch", line_no)

        angle = _parse_angle(angle_text, line_no) if parametric else None
        try:
            gates.append(GateOp(name, tuple(qubits), angle, comment))
        except ValueError as e:
            raise QasmParseError(str(e), line_no) from e

    if not seen_header:
        raise QasmParseError("Missing OPENQASM 2.0 header")
    if n_qubits is None:
        raise QasmParseError("Missing qreg declaration")
    logger.debug(f"Parsed {len(gates)} gates on {n_qubits} qubits")
    return Circuit(n_qubits, tuple(gates))

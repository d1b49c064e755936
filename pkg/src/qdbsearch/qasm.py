"""OpenQASM 3 export/import for the h / x / ctrl / negctrl subset.

Multi-target gates are written one line per target. A multi-target or uncontrolled
MultiControlledX is preceded by a `// @mcx <k>` comment and its k lines are rebuilt into
one gate on import; untagged lines always stay separate gates. Circuit markers travel as
`// @marker <label>` comment lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import groupby

from qdbsearch.circuit import Circuit, Marker
from qdbsearch.errors import OverlappingControlTarget, ParseError, UnsupportedGate
from qdbsearch.gates import Control, Gate, Hadamard, MultiControlledX, PauliX

HEADER = "OPENQASM 3.0;"
MARKER_PREFIX = "// @marker "
GROUP_PREFIX = "// @mcx "

_QUBIT_DECL = re.compile(r"^qubit\s*\[\s*(\d+)\s*\]\s+q\s*;$")
_INCLUDE = re.compile(r'^include\s+"[^"]*"\s*;$')
_GATE = re.compile(r"^(?P<mods>(?:[A-Za-z_]\w*\s*(?:\(\s*[^)]*\))?\s*@\s*)*)(?P<name>[A-Za-z_]\w*)\s+(?P<args>[^;]+);$")
_MODIFIER = re.compile(r"^(?P<name>[A-Za-z_]\w*)\s*(?:\(\s*(?P<count>[^)]*)\s*\))?$")
_QUBIT_REF = re.compile(r"^q\s*\[\s*(\d+)\s*\]$")


def _ref(qubit: int) -> str:
    return f"q[{qubit}]"


def _modifiers(controls: tuple[Control, ...]) -> str:
    parts = []
    for positive, run in groupby(controls, key=lambda c: c.positive):
        count = len(list(run))
        name = "ctrl" if positive else "negctrl"
        parts.append(name if count == 1 else f"{name}({count})")
    return "".join(f"{part} @ " for part in parts)


def _gate_lines(gate: Gate) -> list[str]:
    if isinstance(gate, Hadamard):
        return [f"h {_ref(gate.target)};"]
    if isinstance(gate, PauliX):
        return [f"x {_ref(gate.target)};"]
    prefix = _modifiers(gate.controls)
    wires = [_ref(c.qubit) for c in gate.controls]
    group = [f"{GROUP_PREFIX}{len(gate.targets)}"] if len(gate.targets) > 1 or not gate.controls else []
    return group + [f"{prefix}x {', '.join([*wires, _ref(t)])};" for t in gate.targets]


def export_qasm(circuit: Circuit) -> str:
    lines = [HEADER, f"qubit[{circuit.qubit_count}] q;"]
    markers = sorted(enumerate(circuit.markers), key=lambda item: (item[1].position, item[0]))
    cursor = 0
    for position, gate in enumerate(circuit.gates):
        while cursor < len(markers) and markers[cursor][1].position == position:
            lines.append(MARKER_PREFIX + markers[cursor][1].label)
            cursor += 1
        lines.extend(_gate_lines(gate))
    for _, marker in markers[cursor:]:
        lines.append(MARKER_PREFIX + marker.label)
    return "\n".join(lines) + "\n"


def _parse_controls(mods: str, lineno: int) -> list[bool]:
    polarities: list[bool] = []
    for raw in (part.strip() for part in mods.split("@")):
        if not raw:
            continue
        match = _MODIFIER.match(raw)
        if match is None:
            raise ParseError(lineno, f"malformed gate modifier {raw!r}")
        name, count = match.group("name"), match.group("count")
        if name not in ("ctrl", "negctrl"):
            raise UnsupportedGate(lineno, f"gate modifier {name!r} is not supported")
        if count is None:
            n = 1
        elif count.strip().isdigit() and int(count) > 0:
            n = int(count)
        else:
            raise ParseError(lineno, f"bad control count {count!r}")
        polarities.extend([name == "ctrl"] * n)
    return polarities


def _parse_gate(line: str, lineno: int, qubit_count: int) -> Gate:
    match = _GATE.match(line)
    if match is None:
        raise ParseError(lineno, f"cannot parse {line!r}")
    name = match.group("name")
    polarities = _parse_controls(match.group("mods"), lineno)
    if name not in ("h", "x"):
        raise UnsupportedGate(lineno, f"gate {name!r} is not supported")
    if name == "h" and polarities:
        raise UnsupportedGate(lineno, "controlled h is not supported")

    qubits = []
    for arg in (a.strip() for a in match.group("args").split(",")):
        ref = _QUBIT_REF.match(arg)
        if ref is None:
            raise ParseError(lineno, f"expected a qubit reference q[i], got {arg!r}")
        qubit = int(ref.group(1))
        if qubit >= qubit_count:
            raise ParseError(lineno, f"qubit {qubit} outside qubit[{qubit_count}] q")
        qubits.append(qubit)
    if len(qubits) != len(polarities) + 1:
        raise ParseError(lineno, f"{name} with {len(polarities)} controls takes {len(polarities) + 1} qubits")
    if len(set(qubits)) != len(qubits):
        raise ParseError(lineno, f"repeated qubit in {line!r}")

    if name == "h":
        return Hadamard(qubits[0])
    if not polarities:
        return PauliX(qubits[0])
    controls = tuple(Control(q, p) for q, p in zip(qubits[:-1], polarities, strict=True))
    return MultiControlledX(controls=controls, targets=(qubits[-1],))


@dataclass
class _Group:
    """A `// @mcx k` block still waiting for some of its k lines."""

    line: int
    remaining: int
    controls: tuple[Control, ...] | None = None
    targets: list[int] = field(default_factory=list)

    def add(self, gate: Gate, lineno: int) -> MultiControlledX | None:
        if isinstance(gate, PauliX):
            controls, target = (), gate.target
        elif isinstance(gate, MultiControlledX):
            controls, target = gate.controls, gate.targets[0]
        else:
            raise ParseError(lineno, f"@mcx group opened on line {self.line} holds a non-x gate")
        if self.controls is None:
            self.controls = controls
        elif controls != self.controls:
            raise ParseError(lineno, f"@mcx group opened on line {self.line} mixes control lists")
        self.targets.append(target)
        self.remaining -= 1
        if self.remaining:
            return None
        try:
            return MultiControlledX(controls=self.controls, targets=tuple(self.targets))
        except OverlappingControlTarget as exc:
            raise ParseError(lineno, str(exc)) from None


def _open_group(line: str, lineno: int) -> _Group:
    count = line.removeprefix(GROUP_PREFIX).strip()
    if not count.isdigit() or int(count) < 1:
        raise ParseError(lineno, f"bad @mcx target count {count!r}")
    return _Group(line=lineno, remaining=int(count))


def import_qasm(text: str) -> Circuit:
    seen_header = False
    qubit_count: int | None = None
    gates: list[Gate] = []
    markers: list[Marker] = []
    group: _Group | None = None
    lineno = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith((MARKER_PREFIX, GROUP_PREFIX)) and group is not None:
            raise ParseError(lineno, f"@mcx group opened on line {group.line} is incomplete")
        if line.startswith(MARKER_PREFIX):
            markers.append(Marker(len(gates), line.removeprefix(MARKER_PREFIX).strip()))
            continue
        if line.startswith(GROUP_PREFIX):
            group = _open_group(line, lineno)
            continue
        line = line.split("//", 1)[0].strip()
        if not line:
            continue
        if not seen_header:
            if line != HEADER:
                raise ParseError(lineno, f"expected {HEADER!r}, got {line!r}")
            seen_header = True
            continue
        if _INCLUDE.match(line):
            continue
        decl = _QUBIT_DECL.match(line)
        if decl is not None:
            if qubit_count is not None:
                raise ParseError(lineno, "only a single qubit register is supported")
            qubit_count = int(decl.group(1))
            continue
        if qubit_count is None:
            raise ParseError(lineno, "gate before the qubit[Q] q; declaration")

        gate = _parse_gate(line, lineno, qubit_count)
        if group is None:
            gates.append(gate)
            continue
        merged = group.add(gate, lineno)
        if merged is not None:
            gates.append(merged)
            group = None

    if group is not None:
        raise ParseError(lineno, f"@mcx group opened on line {group.line} is incomplete")
    if not seen_header:
        raise ParseError(lineno, f"missing {HEADER!r} header")
    if qubit_count is None:
        raise ParseError(lineno, "missing qubit[Q] q; declaration")
    return Circuit(qubit_count, tuple(gates), tuple(markers))

"""Compile measurement setups into beam-splitter / phase-shifter layouts.

A ``U(k, l)`` rotation is one 50/50 beam splitter on paths ``k`` and ``l``
with transfer block ``[[1, i], [i, 1]] / sqrt(2)``.  ``V(k, l)`` adds a
``-pi/2`` phase shifter on the input of path ``l`` and a ``+pi/2`` shifter on
its output.  A phase shifter multiplies its path amplitude by
``exp(i * phase)``.
"""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import InvalidSetup
from .protocol import Setup
from .rotations import UnitaryMatrix

BEAM_SPLITTER = "beam_splitter"
PHASE_SHIFTER = "phase_shifter"
DETECTOR = "detector"

_BS_BLOCK = np.array([[1.0, 1.0j], [1.0j, 1.0]]) / math.sqrt(2.0)
_NETLIST_KIND = {BEAM_SPLITTER: "BS", PHASE_SHIFTER: "PS", DETECTOR: "DET"}


@dataclass(frozen=True)
class OpticalElement:
    kind: str
    paths: tuple
    phase: float | None = None
    position: str | None = None

    def __post_init__(self):
        paths = tuple(int(p) for p in self.paths)
        object.__setattr__(self, "paths", paths)
        if self.kind == BEAM_SPLITTER:
            if len(paths) != 2 or paths[0] == paths[1]:
                raise InvalidSetup(f"beam splitter needs two distinct paths, got {paths}")
            if self.phase is not None or self.position is not None:
                raise InvalidSetup("beam splitter takes no phase or position")
        elif self.kind == PHASE_SHIFTER:
            if len(paths) != 1:
                raise InvalidSetup("phase shifter acts on exactly one path")
            if self.phase not in (math.pi / 2, -math.pi / 2):
                raise InvalidSetup(f"phase must be +pi/2 or -pi/2, got {self.phase}")
            if self.position not in ("input", "output"):
                raise InvalidSetup(f"position must be 'input' or 'output', got {self.position}")
        elif self.kind == DETECTOR:
            if len(paths) != 1:
                raise InvalidSetup("detector watches exactly one path")
        else:
            raise InvalidSetup(f"unknown element kind {self.kind!r}")
        if any(p < 0 for p in paths):
            raise InvalidSetup("path indices must be nonnegative")

    def transfer(self, dim):
        """Transfer matrix of this element on ``dim`` paths."""
        t = np.eye(dim, dtype=np.complex128)
        if self.kind == BEAM_SPLITTER:
            t[np.ix_(self.paths, self.paths)] = _BS_BLOCK
        elif self.kind == PHASE_SHIFTER:
            p = self.paths[0]
            t[p, p] = np.exp(1j * self.phase)
        return t

    def netlist_line(self):
        parts = [_NETLIST_KIND[self.kind], *(str(p) for p in self.paths)]
        if self.kind == PHASE_SHIFTER:
            parts.append("+pi/2" if self.phase > 0 else "-pi/2")
            parts.append(self.position)
        return " ".join(parts)


@dataclass(frozen=True)
class OpticalSetup:
    id: str
    elements: tuple
    dim: int

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        if any(p >= self.dim for e in elements for p in e.paths):
            raise InvalidSetup(f"element path outside 0..{self.dim - 1}")
        detectors = [e for e in elements if e.kind == DETECTOR]
        if sorted(e.paths[0] for e in detectors) != list(range(self.dim)):
            raise InvalidSetup("need exactly one detector per path")
        n = len(detectors)
        if any(e.kind == DETECTOR for e in elements[: len(elements) - n]):
            raise InvalidSetup("detectors must come last")

    def to_dict(self):
        return {"id": self.id, "dim": self.dim, "elements": [asdict(e) for e in self.elements]}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, payload):
        elements = tuple(
            OpticalElement(e["kind"], tuple(e["paths"]), e.get("phase"), e.get("position"))
            for e in payload["elements"]
        )
        return cls(payload["id"], elements, int(payload["dim"]))


def compile_setup(setup, dim):
    """Lay out the optical elements realising ``setup``.

    Ordering is canonical: input phase shifters, beam splitters (ascending
    ``k``), output phase shifters, then one detector per path.
    """
    if not isinstance(setup, Setup):
        raise InvalidSetup(f"expected Setup, got {type(setup).__name__}")
    if any(i >= dim for p in setup.pairs for i in p):
        raise InvalidSetup(f"setup {setup.id!r} references a path outside 0..{dim - 1}")
    pairs = sorted(setup.pairs)
    inputs, splitters, outputs = [], [], []
    for k, l in pairs:
        splitters.append(OpticalElement(BEAM_SPLITTER, (k, l)))
        if setup.kind == "V":
            inputs.append(OpticalElement(PHASE_SHIFTER, (l,), -math.pi / 2, "input"))
            outputs.append(OpticalElement(PHASE_SHIFTER, (l,), math.pi / 2, "output"))
    detectors = [OpticalElement(DETECTOR, (p,)) for p in range(dim)]
    return OpticalSetup(setup.id, tuple(inputs + splitters + outputs + detectors), dim)


def setup_unitary(optical):
    """Multiply element transfer matrices in beam order (detectors act trivially)."""
    w = np.eye(optical.dim, dtype=np.complex128)
    for element in optical.elements:
        w = element.transfer(optical.dim) @ w
    return UnitaryMatrix(w)


def emit_netlist(plan):
    """Deterministic text netlist, one ``setup`` block per plan setup."""
    lines = [f"# plan dim={plan.dim} scheme={plan.scheme} setups={len(plan.setups)}"]
    for setup in plan.setups:
        optical = compile_setup(setup, plan.dim)
        pairs = " ".join(f"{k}-{l}" for k, l in setup.pairs) or "-"
        lines.append(f"setup {setup.id} kind={setup.kind} pairs={pairs}")
        lines.extend(f"  {e.netlist_line()}" for e in optical.elements)
        lines.append("end")
    return "\n".join(lines) + "\n"

"""Circuit intermediate representation and static validation.

A circuit is an initial-state descriptor plus an ordered instruction list
over an initial mode count.  Measurements remove their modes, so mode
indices always refer to positions in the *current* state; the static
validator runs a forward scan to check every reference against the live
mode count and every feedforward expression against the registers written
so far.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import channels
from .errors import CircuitSemanticError
from .phasespace import (
    GaussianState,
    coherent,
    squeezed_vacuum,
    thermal,
    two_mode_squeezed_vacuum,
    vacuum,
)

#: name -> (number of mode arguments, parameter names, defaults)
CHANNEL_SIGNATURES = {
    "disp": (1, ("q", "p"), {}),
    "rot": (1, ("theta",), {}),
    "bs": (2, ("theta", "phi"), {"phi": 0.0}),
    "sqz": (1, ("r", "phi"), {"phi": 0.0}),
    "tmss": (2, ("r",), {}),
    "loss": (1, ("eta",), {}),
    "amp": (1, ("gain",), {}),
    "noise": (1, ("gqq", "gqp", "gpp"), {}),
}

#: kind -> (number of mode arguments, parameter names, defaults,
#:          registers written per measurement)
MEASURE_SIGNATURES = {
    "het": (1, (), {}, 2),
    "homq": (1, ("s",), {"s": 15.0}, 1),
    "homp": (1, ("s",), {"s": 15.0}, 1),
    "eprdyne": (2, ("s",), {"s": 1.0}, 4),
    "vacuumproj": (1, (), {}, 1),
    "absorb": (1, (), {}, 1),
}

INIT_SIGNATURES = {
    "vacuum": (0, (), {}),
    "coherent": (1, ("q", "p"), {}),
    "squeezed": (1, ("r",), {}),
    "thermal": (1, ("nbar",), {}),
    "tmsv": (0, ("r",), {}),
}


@dataclass(frozen=True)
class AffineExpr:
    """Affine function of classical registers: const + sum(coeff * reg)."""

    const: float
    terms: tuple = ()

    def __post_init__(self):
        merged: dict = {}
        for name, coeff in self.terms:
            merged[name] = merged.get(name, 0.0) + float(coeff)
        terms = tuple(sorted((k, v) for k, v in merged.items() if v != 0.0))
        object.__setattr__(self, "const", float(self.const))
        object.__setattr__(self, "terms", terms)

    @property
    def is_constant(self) -> bool:
        return not self.terms

    def registers(self):
        return [name for name, _ in self.terms]

    def evaluate(self, regs: dict) -> float:
        return self.const + sum(c * regs[name] for name, c in self.terms)


@dataclass(frozen=True)
class StateDescriptor:
    """Initial-state constructor: named preparation or an explicit state."""

    name: str
    modes: tuple = ()
    params: dict = field(default_factory=dict)
    state: GaussianState | None = None


@dataclass(frozen=True)
class ChannelInstr:
    name: str
    modes: tuple
    params: dict


@dataclass(frozen=True)
class RawChannelInstr:
    channel: channels.GaussianChannel

    def __eq__(self, other):
        if not isinstance(other, RawChannelInstr):
            return NotImplemented
        return (
            np.array_equal(self.channel.a_matrix, other.channel.a_matrix)
            and np.array_equal(self.channel.g_matrix, other.channel.g_matrix)
            and np.array_equal(self.channel.alpha, other.channel.alpha)
        )


@dataclass(frozen=True)
class CondChannelInstr:
    """Channel whose parameters are affine functions of registers."""

    name: str
    modes: tuple
    params: dict  # name -> AffineExpr


@dataclass(frozen=True)
class MeasureInstr:
    kind: str
    modes: tuple
    params: dict
    registers: tuple


@dataclass(frozen=True)
class Circuit:
    n_modes: int
    initial_state: StateDescriptor
    instructions: tuple


def build_initial_state(desc: StateDescriptor, n_modes: int) -> GaussianState:
    if desc.name == "vacuum":
        return vacuum(n_modes)
    if desc.name == "coherent":
        return coherent(n_modes, desc.modes[0], desc.params["q"], desc.params["p"])
    if desc.name == "squeezed":
        return squeezed_vacuum(n_modes, desc.modes[0], desc.params["r"])
    if desc.name == "thermal":
        return thermal(n_modes, desc.modes[0], desc.params["nbar"])
    if desc.name == "tmsv":
        return two_mode_squeezed_vacuum(desc.params["r"])
    if desc.name == "explicit":
        return desc.state
    raise ValueError(f"unknown initial state {desc.name!r}")


def build_named_channel(name: str, modes, params: dict, n: int) -> channels.GaussianChannel:
    if name == "disp":
        alpha = np.zeros(2 * n)
        alpha[modes[0] - 1] = params["q"]
        alpha[n + modes[0] - 1] = params["p"]
        return channels.displacement(n, alpha)
    if name == "rot":
        return channels.phase_rotation(n, modes[0], params["theta"])
    if name == "bs":
        return channels.beamsplitter(n, modes[0], modes[1], params["theta"], params.get("phi", 0.0))
    if name == "sqz":
        return channels.squeezer(n, modes[0], params["r"], params.get("phi", 0.0))
    if name == "tmss":
        return channels.two_mode_squeezer(n, modes[0], modes[1], params["r"])
    if name == "loss":
        return channels.loss(n, modes[0], params["eta"])
    if name == "amp":
        return channels.amplifier(n, modes[0], params["gain"])
    if name == "noise":
        g = [[params["gqq"], params["gqp"]], [params["gqp"], params["gpp"]]]
        return channels.classical_noise(n, modes[0], g)
    raise ValueError(f"unknown channel {name!r}")


def _check_modes(modes, n_live, idx, what):
    if len(set(modes)) != len(modes):
        raise CircuitSemanticError(
            f"{what} references mode {modes} more than once", instruction_index=idx
        )
    for m in modes:
        if not 1 <= m <= n_live:
            raise CircuitSemanticError(
                f"{what} references mode {m} but only {n_live} mode(s) are live",
                instruction_index=idx,
            )


def validate(circuit: Circuit) -> None:
    """Static forward scan; raises CircuitSemanticError on the first defect.

    Sound by construction: a circuit that passes cannot raise mode or
    register errors at runtime.
    """
    if circuit.n_modes < 1:
        raise CircuitSemanticError("circuit needs at least one mode")
    desc = circuit.initial_state
    if desc.name not in INIT_SIGNATURES and desc.name != "explicit":
        raise CircuitSemanticError(f"unknown initial state {desc.name!r}")
    if desc.name == "tmsv" and circuit.n_modes != 2:
        raise CircuitSemanticError("tmsv initial state requires exactly 2 modes")
    if desc.name == "explicit":
        if desc.state is None or desc.state.n != circuit.n_modes:
            raise CircuitSemanticError("explicit initial state has wrong mode count")
    if desc.modes:
        _check_modes(desc.modes, circuit.n_modes, None, "initial state")

    n_live = circuit.n_modes
    written: set = set()
    for idx, instr in enumerate(circuit.instructions):
        if isinstance(instr, (ChannelInstr, CondChannelInstr)):
            sig = CHANNEL_SIGNATURES.get(instr.name)
            if sig is None:
                raise CircuitSemanticError(
                    f"unknown channel {instr.name!r}", instruction_index=idx
                )
            n_args, names, defaults = sig
            if len(instr.modes) != n_args:
                raise CircuitSemanticError(
                    f"{instr.name} takes {n_args} mode argument(s), got {len(instr.modes)}",
                    instruction_index=idx,
                )
            _check_modes(instr.modes, n_live, idx, instr.name)
            for pname in names:
                if pname not in instr.params and pname not in defaults:
                    raise CircuitSemanticError(
                        f"{instr.name} missing parameter {pname!r}", instruction_index=idx
                    )
            for pname in instr.params:
                if pname not in names:
                    raise CircuitSemanticError(
                        f"{instr.name} has no parameter {pname!r}", instruction_index=idx
                    )
            if isinstance(instr, CondChannelInstr):
                for pname, expr in instr.params.items():
                    for reg in expr.registers():
                        if reg not in written:
                            raise CircuitSemanticError(
                                f"register {reg!r} used before it is written",
                                instruction_index=idx,
                            )
        elif isinstance(instr, RawChannelInstr):
            if instr.channel.n_in != n_live or instr.channel.n_out != n_live:
                raise CircuitSemanticError(
                    f"raw channel is {instr.channel.n_in}->{instr.channel.n_out} modes "
                    f"but {n_live} are live",
                    instruction_index=idx,
                )
        elif isinstance(instr, MeasureInstr):
            sig = MEASURE_SIGNATURES.get(instr.kind)
            if sig is None:
                raise CircuitSemanticError(
                    f"unknown measurement {instr.kind!r}", instruction_index=idx
                )
            n_args, names, defaults, n_regs = sig
            if len(instr.modes) != n_args:
                raise CircuitSemanticError(
                    f"{instr.kind} takes {n_args} mode argument(s), got {len(instr.modes)}",
                    instruction_index=idx,
                )
            _check_modes(instr.modes, n_live, idx, instr.kind)
            for pname in instr.params:
                if pname not in names:
                    raise CircuitSemanticError(
                        f"{instr.kind} has no parameter {pname!r}", instruction_index=idx
                    )
            if len(instr.registers) != n_regs:
                raise CircuitSemanticError(
                    f"{instr.kind} writes {n_regs} register(s), got {len(instr.registers)}",
                    instruction_index=idx,
                )
            if len(set(instr.registers)) != len(instr.registers):
                raise CircuitSemanticError(
                    "duplicate register names in measurement", instruction_index=idx
                )
            for reg in instr.registers:
                if reg in written:
                    raise CircuitSemanticError(
                        f"register {reg!r} redefined", instruction_index=idx
                    )
            written.update(instr.registers)
            n_live -= len(instr.modes)
            if n_live < 0:
                raise CircuitSemanticError(
                    "more modes measured than exist", instruction_index=idx
                )
        else:
            raise CircuitSemanticError(
                f"unknown instruction type {type(instr).__name__}", instruction_index=idx
            )


def live_mode_count(circuit: Circuit) -> int:
    """Final mode count after all measurements."""
    n = circuit.n_modes
    for instr in circuit.instructions:
        if isinstance(instr, MeasureInstr):
            n -= len(instr.modes)
    return n

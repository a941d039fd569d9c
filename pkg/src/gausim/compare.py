"""Engine-vs-oracle cross-validation of circuit moments and weights.

Replays a circuit in the truncated number basis and diffs first/second
moments (and conditioning weights) against the phase-space engine.  Only
circuits the oracle can represent are accepted: at most 3 modes, named
channels (no raw matrices), and measurements limited to fixed-outcome
heterodyne (while the state is pure) and vacuum projection.
"""

from __future__ import annotations

import numpy as np

from . import circuit as ir
from . import engine, fock

DEFAULT_COMPARE_TOL = 1e-5


def _oracle_initial(desc: ir.StateDescriptor, n_modes: int, cutoff: int):
    if desc.name == "explicit":
        raise ValueError("oracle cannot replay explicit initial states")
    params = dict(desc.params)
    params["n"] = n_modes
    if desc.modes:
        params["mode"] = desc.modes[0]
    return fock.from_gaussian(desc.name, params, cutoff)


def _oracle_replay(circuit: ir.Circuit, cutoff: int, outcomes: dict | None):
    state = _oracle_initial(circuit.initial_state, circuit.n_modes, cutoff)
    registers: dict = {}
    log_weight = 0.0
    for instr in circuit.instructions:
        if isinstance(instr, ir.ChannelInstr):
            state = fock.apply_channel(state, instr.name, instr.modes, instr.params)
        elif isinstance(instr, ir.CondChannelInstr):
            params = {k: expr.evaluate(registers) for k, expr in instr.params.items()}
            state = fock.apply_channel(state, instr.name, instr.modes, params)
        elif isinstance(instr, ir.MeasureInstr):
            if instr.kind == "het":
                if not isinstance(state, fock.FockState):
                    raise ValueError(
                        "oracle heterodyne conditioning needs a pure state"
                    )
                values = [float(outcomes[r]) for r in instr.registers]
                state, density = fock.condition_coherent_projection(
                    state, instr.modes[0], values
                )
                log_weight += float(np.log(density))
                for reg, value in zip(instr.registers, values):
                    registers[reg] = value
            elif instr.kind == "vacuumproj":
                state, prob = fock.condition_photodetection(
                    state, instr.modes[0], "no_absorption"
                )
                log_weight += float(np.log(prob))
                registers[instr.registers[0]] = 0.0
            else:
                raise ValueError(f"oracle cannot replay measurement {instr.kind!r}")
        else:
            raise ValueError("oracle cannot replay raw channels")
    return state, log_weight


def compare_circuit(
    circuit: ir.Circuit,
    cutoff: int,
    outcomes: dict | None = None,
    tol: float = DEFAULT_COMPARE_TOL,
) -> dict:
    """Run both simulators and report the worst moment discrepancy."""
    result = engine.run(circuit, outcomes=outcomes if outcomes is not None else {})
    oracle_state, oracle_log_weight = _oracle_replay(circuit, cutoff, outcomes)
    xi, gamma = fock.moments(oracle_state)
    final = result.final_state
    max_xi = float(np.max(np.abs(xi - final.xi))) if final.n else 0.0
    max_gamma = float(np.max(np.abs(gamma - final.gamma))) if final.n else 0.0
    report = {
        "cutoff": cutoff,
        "tolerance": tol,
        "norm_deficit": oracle_state.norm_deficit,
        "max_xi_diff": max_xi,
        "max_gamma_diff": max_gamma,
        "engine_log_weight": result.total_log_weight,
        "oracle_log_weight": oracle_log_weight,
        "log_weight_diff": abs(result.total_log_weight - oracle_log_weight),
        "passed": bool(max_xi <= tol and max_gamma <= tol),
    }
    return report

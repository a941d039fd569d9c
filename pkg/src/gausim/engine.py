"""Circuit execution: channels, measurements, and classical feedforward.

Two run modes with distinct weight semantics:

* posterior — every measurement outcome is fixed by the caller, and
  ``total_log_weight`` is the accumulated log probability (vacuum
  projections) or log density (dyne outcomes) of that outcome assignment.
* sampled — outcomes are drawn from their actual distributions using an
  explicit seed; the weight then records the density of the realized
  trajectory.

Conditional channels evaluate their affine parameter expressions against
the registers written by earlier measurements, are rebuilt, and re-checked
for complete positivity before applying.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import channels as ch
from . import circuit as ir
from . import measure as ms
from .errors import GausimError


@dataclass(frozen=True)
class RunResult:
    final_state: object
    records: tuple
    total_log_weight: float
    shot_index: int | None = None
    seed: int | None = None


def _build_measurement_spec(instr: ir.MeasureInstr) -> ms.MeasurementSpec:
    if instr.kind == "het":
        return ms.heterodyne_spec(instr.modes)
    if instr.kind in ("homq", "homp"):
        s = instr.params.get("s", ms.DEFAULT_HOMODYNE_S)
        return ms.homodyne_spec(instr.modes[0], instr.kind[-1], s)
    if instr.kind == "eprdyne":
        return ms.epr_spec(instr.modes[0], instr.modes[1], instr.params.get("s", 1.0))
    if instr.kind == "vacuumproj":
        return ms.vacuum_projection_spec(instr.modes[0])
    raise ValueError(f"unknown measurement kind {instr.kind!r}")


def _posterior_outcome(instr: ir.MeasureInstr, outcomes: dict) -> np.ndarray:
    values = []
    for reg in instr.registers:
        if reg not in outcomes:
            raise ValueError(
                f"posterior mode requires an outcome for register {reg!r}"
            )
        values.append(float(outcomes[reg]))
    return np.asarray(values)


def _execute_measure(state, instr, outcomes, rng, registers):
    if instr.kind == "absorb":
        # Refused by construction; raises NonGaussianOutcomeError.
        ms.condition_absorption(state, instr.modes[0])
    if instr.kind == "vacuumproj":
        state, record = ms.condition_no_absorption(state, instr.modes[0])
        registers[instr.registers[0]] = 0.0
        return state, record
    if instr.kind in ("homq", "homp"):
        s = instr.params.get("s", ms.DEFAULT_HOMODYNE_S)
        quad = instr.kind[-1]
        if outcomes is not None:
            value = _posterior_outcome(instr, outcomes)[0]
            state, record = ms.homodyne(state, instr.modes[0], quad, outcome=value, s=s)
        else:
            state, record = ms.homodyne(state, instr.modes[0], quad, rng=rng, s=s)
        registers[instr.registers[0]] = float(record.outcome[0])
        return state, record
    spec = _build_measurement_spec(instr)
    if outcomes is not None:
        state, record = ms.condition(state, spec, _posterior_outcome(instr, outcomes))
    else:
        state, record = ms.sample(state, spec, rng)
    for reg, value in zip(instr.registers, record.outcome):
        registers[reg] = float(value)
    return state, record


def run(
    circuit: ir.Circuit,
    *,
    outcomes: dict | None = None,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
    shot_index: int | None = None,
) -> RunResult:
    """Execute a statically valid circuit.

    Exactly one of ``outcomes`` (posterior mode) or ``seed``/``rng``
    (sampled mode) must be given.  Errors raised mid-circuit carry the
    offending ``instruction_index``.
    """
    sampled = outcomes is None
    if sampled and seed is None and rng is None:
        raise ValueError("sampled mode needs a seed or rng; posterior mode needs outcomes")
    if not sampled and (seed is not None or rng is not None):
        raise ValueError("give either outcomes (posterior) or a seed (sampled), not both")
    ir.validate(circuit)
    if sampled and rng is None:
        rng = np.random.default_rng(seed)

    state = ir.build_initial_state(circuit.initial_state, circuit.n_modes)
    initial_log_weight = state.log_weight
    registers: dict = {}
    records = []
    for idx, instr in enumerate(circuit.instructions):
        try:
            if isinstance(instr, ir.ChannelInstr):
                channel = ir.build_named_channel(instr.name, instr.modes, instr.params, state.n)
                state = ch.apply(channel, state)
            elif isinstance(instr, ir.CondChannelInstr):
                params = {k: expr.evaluate(registers) for k, expr in instr.params.items()}
                channel = ir.build_named_channel(instr.name, instr.modes, params, state.n)
                # Feedforward values can push the channel off the CP cone;
                # always re-check the instantiated channel.
                diag = ch.validate_cp(channel)
                if not diag.passed:
                    raise ch.RejectedChannelError(
                        f"feedforward channel fails the CP check "
                        f"(min eigenvalue {diag.min_eigenvalue:.3e})",
                        min_eigenvalue=diag.min_eigenvalue,
                    )
                state = ch.apply(channel, state)
            elif isinstance(instr, ir.RawChannelInstr):
                state = ch.apply(instr.channel, state)
            elif isinstance(instr, ir.MeasureInstr):
                state, record = _execute_measure(state, instr, outcomes, rng, registers)
                records.append(record)
            else:
                raise TypeError(f"unknown instruction {type(instr).__name__}")
        except GausimError as exc:
            exc.instruction_index = idx
            raise
    return RunResult(
        final_state=state,
        records=tuple(records),
        total_log_weight=state.log_weight - initial_log_weight,
        shot_index=shot_index,
        seed=seed,
    )


def run_shots(
    circuit: ir.Circuit,
    n_shots: int,
    base_seed: int,
    parallel: bool = False,
    max_workers: int = 4,
) -> list:
    """Independent sampled runs with seeds split from ``base_seed``.

    Results are ordered by shot index and bit-identical whether executed
    serially or in parallel: each shot draws from its own generator spawned
    deterministically from the base seed.
    """
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    ir.validate(circuit)
    children = np.random.SeedSequence(base_seed).spawn(n_shots)

    def one(i: int) -> RunResult:
        result = run(circuit, rng=np.random.default_rng(children[i]), shot_index=i)
        return RunResult(
            final_state=result.final_state,
            records=result.records,
            total_log_weight=result.total_log_weight,
            shot_index=i,
            seed=base_seed,
        )

    if parallel:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(one, range(n_shots)))
    return [one(i) for i in range(n_shots)]

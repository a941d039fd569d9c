"""JSON schemas for states, channels, measurement records, and run results.

All dumps use sorted keys and Python's shortest-round-trip float repr, so
output is byte-stable for a given input.  State deserialization
re-symmetrizes the covariance and re-validates physicality.
"""

from __future__ import annotations

import json

import numpy as np

from .channels import GaussianChannel
from .measure import MeasurementRecord
from .phasespace import GaussianState, check_physical

RESULT_SCHEMA = "v1"


def state_to_dict(state: GaussianState) -> dict:
    return {
        "n": state.n,
        "xi": state.xi.tolist(),
        "gamma": state.gamma.tolist(),
        "log_weight": state.log_weight,
    }


def state_from_dict(data: dict, validate: bool = True) -> GaussianState:
    state = GaussianState(
        np.asarray(data["xi"], dtype=float),
        np.asarray(data["gamma"], dtype=float),
        float(data.get("log_weight", 0.0)),
    )
    if state.n != int(data["n"]):
        raise ValueError(f"declared n={data['n']} but arrays describe {state.n} modes")
    if validate:
        diag = check_physical(state)
        if not diag.passed:
            raise ValueError(
                f"deserialized state is unphysical (min eigenvalue "
                f"{diag.min_eigenvalue:.3e})"
            )
    return state


def channel_to_dict(channel: GaussianChannel) -> dict:
    return {
        "n_in": channel.n_in,
        "n_out": channel.n_out,
        "alpha": channel.alpha.tolist(),
        "A": channel.a_matrix.tolist(),
        "G": channel.g_matrix.tolist(),
    }


def channel_from_dict(data: dict) -> GaussianChannel:
    channel = GaussianChannel(
        np.asarray(data["A"], dtype=float),
        np.asarray(data["G"], dtype=float),
        np.asarray(data["alpha"], dtype=float),
    )
    if channel.n_in != int(data["n_in"]) or channel.n_out != int(data["n_out"]):
        raise ValueError("declared mode counts disagree with matrix shapes")
    return channel


def record_to_dict(record: MeasurementRecord) -> dict:
    return {
        "modes": list(record.spec.modes),
        "kind": record.spec.kind,
        "outcome": record.outcome.tolist(),
        "log_density": record.log_density,
    }


def result_to_dict(result) -> dict:
    return {
        "schema": RESULT_SCHEMA,
        "shot_index": result.shot_index,
        "seed": result.seed,
        "final_state": state_to_dict(result.final_state),
        "records": [record_to_dict(r) for r in result.records],
        "total_log_weight": result.total_log_weight,
    }


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))

"""
Discrete second-order autoregulation model and the ten ARI template curves.

One step of the model, with h = 1 / (fs * T):

    x1' = x1 + (dP_prev - x2) * h
    x2' = x2 + (x1 - 2 * D * x2) * h
    v   = 1 + dP_prev - K * x2'

The simulation starts from the rest state (0, 0) and treats dP(-1) as 0, so
output and input have the same length.
"""
from typing import List, Tuple
from errors import ParameterError, SimulationError
from schemas.aaslid_tiecks_schema import ATParameters, ATState, AriTemplateTable
from schemas.signal_schema import SampledSignal
import numpy as np

STANDARD_TABLE = AriTemplateTable.standard()

def _advance(x1: float, x2: float, dp_prev: float, K: float, D: float, denom: float) -> Tuple[float, float, float]:
    """Plain-float step shared by at_step and at_simulate so both stay bit-identical."""
    nx1 = x1 + (dp_prev - x2) / denom
    nx2 = x2 + (x1 - 2.0 * D * x2) / denom
    return nx1, nx2, 1.0 + dp_prev - K * nx2

def at_step(state: ATState, dP_prev: float, params: ATParameters, fs: float) -> Tuple[ATState, float]:
    """Advance the model by one sample. Returns the new state and the normalized velocity."""
    if not fs > 0:
        raise ParameterError(f"Sampling frequency must be positive, got {fs}")
    x1, x2, v = _advance(state.x1, state.x2, dP_prev, params.K, params.D, fs * params.T)
    return ATState(x1=x1, x2=x2), v

def at_simulate(dP: SampledSignal, params: ATParameters, label: str = "v") -> SampledSignal:
    """Normalized velocity response of one parameter set to a normalized pressure signal."""
    K, D = params.K, params.D
    denom = dP.fs * params.T
    x1 = x2 = 0.0
    dp_prev = 0.0
    out = np.empty(len(dP))
    for t, dp in enumerate(dP.samples.tolist()):
        x1, x2, out[t] = _advance(x1, x2, dp_prev, K, D, denom)
        dp_prev = dp
    if not (np.isfinite(x1) and np.isfinite(x2) and np.all(np.isfinite(out))):
        raise SimulationError(f"Model state diverged (K={K}, D={D}, T={params.T}, fs={dP.fs} Hz)")
    return dP.derive(out, label=label)

def generate_templates(dP: SampledSignal, table: AriTemplateTable = STANDARD_TABLE) -> List[SampledSignal]:
    """The ten template responses, element k for ARI k."""
    return [
        at_simulate(dP, row.params, label=f"ARI{row.ari}")
        for row in table.rows
    ]

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .power import PowerSolution


@dataclass
class SolveReport:
    """Outcome of one (scheme, scenario) solve.

    ``placements`` holds one array for shared-placement schemes and two
    (slot 1, slot 2) for TDMA. Baselines carry the fixed antenna positions.
    """

    scheme: str
    placements: list
    power: PowerSolution
    gains: tuple = (float("nan"), float("nan"))
    objective_trace: list = field(default_factory=list)
    sca_iters: int = 0
    runtime_ms: float = 0.0
    status: str = "ok"

    @property
    def total_power(self) -> float:
        return self.power.total

    def placement_str(self) -> str:
        return "|".join(";".join(f"{v:.6f}" for v in np.atleast_1d(p)) for p in self.placements)

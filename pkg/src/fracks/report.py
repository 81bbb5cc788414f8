"""Run report container shared by the integrator, the experiments and the writers."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .dynamics import State

SERIES_COLUMNS = ("t", "mean", "l2_dev", "sup_dev", "h_half", "grad_sup", "dt",
                  "cert_margin", "poincare_ok", "agmon_ratio")


class Status(str, enum.Enum):
    OK = "OK"
    BLOWUP_DETECTED = "BLOWUP_DETECTED"
    DT_UNDERFLOW = "DT_UNDERFLOW"


@dataclass
class RunReport:
    rows: list = field(default_factory=list)
    status: Status = Status.OK
    config_echo: dict = field(default_factory=dict)
    final_state: State | None = None
    max_grad: float = 0.0
    t_terminal: float = 0.0
    steps: int = 0

    def column(self, name: str) -> list:
        return [row.get(name) for row in self.rows]

    def times(self) -> list:
        return self.column("t")

    def series(self, name: str) -> list:
        """``(t, value)`` pairs of one monitored column."""
        return [(row["t"], row[name]) for row in self.rows
                if row.get(name) is not None]

    @property
    def finished(self) -> bool:
        return self.status is Status.OK

    def check(self):
        ts = self.times()
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise AssertionError("report rows are not strictly increasing in t")
        if self.status is Status.OK and self.rows:
            last = self.rows[-1]
            if not all(math.isfinite(last[c]) for c in ("l2_dev", "sup_dev", "grad_sup")):
                raise AssertionError("status OK with a non-finite final row")

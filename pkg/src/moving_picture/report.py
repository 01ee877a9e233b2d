"""Check results shared by every verification routine."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Mapping

from .hilbert import SystemParams


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a single numerical check.

    ``passed`` is derived: a report passes iff ``residual <= tolerance``.
    ``runtime_ms`` is wall-clock and is kept out of the deterministic report
    body by the CLI.
    """

    check_name: str
    system: str
    params: dict
    residual: float
    tolerance: float
    runtime_ms: float = 0.0
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        r = float(self.residual)
        if math.isnan(r):
            r = math.inf
        if r < 0:
            raise ValueError("residual must be non-negative")
        object.__setattr__(self, "residual", r)
        object.__setattr__(self, "tolerance", float(self.tolerance))
        object.__setattr__(self, "metadata", {str(k): str(v) for k, v in self.metadata.items()})

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def to_dict(self, include_runtime: bool = False) -> dict:
        d = {
            "check_name": self.check_name,
            "system": self.system,
            "params": dict(self.params),
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "metadata": dict(sorted(self.metadata.items())),
        }
        if include_runtime:
            d["runtime_ms"] = self.runtime_ms
        return d


class Timer:
    """Context manager measuring elapsed milliseconds."""

    def __enter__(self):
        self._start = time.perf_counter()
        self.ms = 0.0
        return self

    def __exit__(self, *exc):
        self.ms = (time.perf_counter() - self._start) * 1e3
        return False


def make_report(name: str, params: SystemParams, residual: float, tolerance: float,
                timer: Timer | None = None, **metadata) -> CheckReport:
    ms = 0.0
    if timer is not None:
        ms = (time.perf_counter() - timer._start) * 1e3
    return CheckReport(
        check_name=name,
        system=params.system.value,
        params=params.as_dict(),
        residual=residual,
        tolerance=tolerance,
        runtime_ms=ms,
        metadata=metadata,
    )

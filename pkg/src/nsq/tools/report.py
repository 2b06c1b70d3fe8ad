"""Run reports: named checks with pass/fail/inconclusive status, payload and timing."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from nsq.schemas import CheckModel, RunReportModel
from nsq.symmetry.fields import FAIL, INCONCLUSIVE, PASS

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""
    data: dict = field(default_factory=dict)

    @classmethod
    def of(cls, name: str, ok: bool, detail: str = "", **data) -> Check:
        return cls(name, PASS if ok else FAIL, detail, data)

    @property
    def passed(self) -> bool:
        return self.status == PASS


@dataclass
class RunReport:
    command: str
    checks: list[Check] = field(default_factory=list)
    payload: dict = field(default_factory=dict)
    elapsed_s: float = 0.0
    _started: float = field(default_factory=time.perf_counter, repr=False)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def finish(self) -> RunReport:
        self.elapsed_s = time.perf_counter() - self._started
        return self

    @property
    def status(self) -> str:
        statuses = {c.status for c in self.checks}
        if FAIL in statuses:
            return FAIL
        if INCONCLUSIVE in statuses:
            return INCONCLUSIVE
        return PASS

    @property
    def exit_code(self) -> int:
        return EXIT_FAILURE if self.status == FAIL else EXIT_OK

    def counts(self) -> dict[str, int]:
        counts = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
        for c in self.checks:
            counts[c.status] += 1
        return counts

    def to_dict(self) -> dict:
        model = RunReportModel(
            command=self.command,
            status=self.status,
            checks=[CheckModel(name=c.name, status=c.status, detail=c.detail, data=c.data) for c in self.checks],
            elapsed_s=round(self.elapsed_s, 6),
            payload=self.payload,
        )
        return model.model_dump()

    def render(self) -> str:
        """Plain-text summary table."""
        lines = []
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            line = f"{c.status.upper():<12} {c.name:<{width}}"
            if c.detail:
                line += f"  {c.detail}"
            lines.append(line.rstrip())
        counts = self.counts()
        lines.append(
            f"{self.command}: {self.status} "
            f"({counts[PASS]} pass, {counts[FAIL]} fail, {counts[INCONCLUSIVE]} inconclusive) "
            f"in {self.elapsed_s:.2f}s"
        )
        if self.payload:
            lines.append(json.dumps(self.payload, indent=2))
        return "\n".join(lines)

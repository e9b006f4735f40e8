"""Deferred invariant checks run by the verification suite."""

import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, Tuple


@dataclass
class CheckResult:
    """Outcome of one executed check."""

    name: str
    passed: bool
    detail: str
    seconds: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": round(self.seconds, 3),
        }


class Check:
    """A named invariant, evaluated on demand.

    The callback returns either a bool or a (bool, detail) pair. Checks sort by
    the size n of the instance they touch so cheap ones run first.
    """

    def __init__(self, name: str, n: int, callback: Callable, args: Tuple[Any, ...] = (), kwargs: Dict[str, Any] = None):
        self.name = name
        self.n = n
        self.callback = callback
        self.args = args
        self.kwargs = kwargs or {}

    def __lt__(self, other):
        return (self.n, self.name) < (other.n, other.name)

    def __repr__(self):
        return f"Check({self.name!r}, n={self.n})"

    def execute(self) -> CheckResult:
        """Run the callback; an exception counts as a failure."""
        start = time.perf_counter()
        try:
            outcome = self.callback(*self.args, **self.kwargs)
        except Exception as e:  # noqa: BLE001
            return CheckResult(self.name, False, f"{type(e).__name__}: {e}", time.perf_counter() - start)
        if isinstance(outcome, tuple):
            passed, detail = outcome
        else:
            passed, detail = bool(outcome), ""
        return CheckResult(self.name, bool(passed), detail, time.perf_counter() - start)

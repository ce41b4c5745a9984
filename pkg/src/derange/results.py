"""Check outcome record shared by every verification suite."""

from dataclasses import dataclass, field
from fractions import Fraction

PASS = "pass"
FAIL = "fail"
VIOLATION_SMALL = "violation-at-small-n"
SKIPPED = "skipped"
STATISTICAL = "statistical"

STATUSES = (PASS, FAIL, VIOLATION_SMALL, SKIPPED, STATISTICAL)


def ratio_str(x):
    """Stable num/den rendering for report fields (exact, never floats)."""
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return f"{x}/1"
    return str(x)


@dataclass
class CheckResult:
    """Outcome of one harness check.

    anchor states the verified claim in plain mathematical terms; lhs/rhs are
    the two sides of the comparison as exact rationals; witness carries the
    identifying parameters (and, on failure, the offending data).
    """

    check_id: str
    anchor: str
    status: str
    lhs: Fraction | int | str | None = None
    rhs: Fraction | int | str | None = None
    witness: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAIL and not self.witness:
            raise ValueError("failing checks must carry a witness")

    @property
    def ok(self):
        return self.status != FAIL

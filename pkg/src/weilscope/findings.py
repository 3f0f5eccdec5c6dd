"""Finding records emitted by conjecture and identity checks.

Checks return findings rather than booleans so that campaign reports can
aggregate evidence. COUNTEREXAMPLE and FORMULA-MISMATCH findings must carry
enough payload (full spectra or profiles) for independent audit.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

WITNESS = "WITNESS"
PASS = "PASS"
COUNTEREXAMPLE = "COUNTEREXAMPLE"
TABLE_DISCREPANCY = "TABLE-DISCREPANCY"
FORMULA_MISMATCH = "FORMULA-MISMATCH"
SKIPPED = "SKIPPED"

KINDS = (WITNESS, PASS, COUNTEREXAMPLE, TABLE_DISCREPANCY,
         FORMULA_MISMATCH, SKIPPED)

# kinds that make a campaign exit nonzero
ALARM_KINDS = (COUNTEREXAMPLE, FORMULA_MISMATCH)


@dataclass(frozen=True)
class Finding:
    kind: str
    check: str
    p: int
    m: int
    canonical: int  # canonical exponent of the class, 0 for field-level checks
    field: str  # field descriptor line
    payload: dict = dataclass_field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown finding kind {self.kind!r}")

    @property
    def sort_key(self):
        return (self.p, self.m, self.canonical, self.check, self.kind)

    @property
    def is_alarm(self) -> bool:
        return self.kind in ALARM_KINDS

    def to_record(self) -> dict:
        return {
            "kind": self.kind,
            "check": self.check,
            "p": self.p,
            "m": self.m,
            "canonical": self.canonical,
            "field": self.field,
            "payload": self.payload,
        }


def finding_from_record(rec: dict) -> Finding:
    return Finding(
        kind=rec["kind"],
        check=rec["check"],
        p=int(rec["p"]),
        m=int(rec["m"]),
        canonical=int(rec["canonical"]),
        field=rec["field"],
        payload=rec.get("payload", {}),
    )

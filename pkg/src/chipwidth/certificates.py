"""Serializable claim/verdict records shared by the solvers and the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class Certificate:
    """One checked claim: what was claimed, what was found, and the witness.

    verdict is "pass" or "fail". proof names the procedure that settled the
    claim (e.g. branch_and_bound, exhaustive, subset_dp). timing is wall
    seconds; serialization can withhold it so that repeated runs on the same
    input stay byte-identical.
    """

    claim: dict
    verdict: str
    witness: dict
    proof: str
    timing: float | None

    def to_dict(self, include_timing: bool = True) -> dict:
        return {
            "claim": self.claim,
            "verdict": self.verdict,
            "witness": self.witness,
            "proof": self.proof,
            "timing": self.timing if include_timing else None,
        }

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        data = json.loads(text)
        missing = {"claim", "verdict", "witness", "proof", "timing"} - set(data)
        if missing:
            raise ValueError(f"certificate missing keys: {sorted(missing)}")
        return cls(
            claim=data["claim"],
            verdict=data["verdict"],
            witness=data["witness"],
            proof=data["proof"],
            timing=data["timing"],
        )

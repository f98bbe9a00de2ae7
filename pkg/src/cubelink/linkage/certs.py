"""Pairings, obstruction witnesses, and linkage certificates."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import CubelinkError


def check_pairing(pairs):
    """Validate and normalise a pairing: list of (s, t) tuples."""
    pairs = [tuple(p) for p in pairs]
    X = [v for p in pairs for v in p]
    if len(set(X)) != len(X):
        raise ValueError("terminals must be distinct")
    if not pairs:
        raise ValueError("need at least one pair")
    return pairs


def terminals(pairs):
    return {v for p in pairs for v in p}


@dataclass
class ObstructionWitness:
    kind: str              # "config-3F" or "config-dF"
    facet: list            # vertex ids of the blocking facet
    pair: tuple            # the (s1, t1) pair at facet-diameter distance
    blocking: list         # the facet-neighbours of t1, all terminals

    def to_json(self, label=str):
        return {
            "kind": self.kind,
            "facet": [label(v) for v in sorted(self.facet)],
            "pair": [label(self.pair[0]), label(self.pair[1])],
            "blocking": [label(v) for v in sorted(self.blocking)],
        }


class Unlinkable(CubelinkError):
    """Raised internally when an instance is obstructed; carries the witness."""

    def __init__(self, witness: ObstructionWitness):
        super().__init__(f"unlinkable: {witness.kind}")
        self.witness = witness


@dataclass
class LinkageCertificate:
    instance: dict
    paths: list | None = None          # list of vertex-id lists, pair order
    obstruction: ObstructionWitness | None = None
    trace: list = field(default_factory=list)
    valid: bool = False

    def to_json(self, label=str):
        result = (
            {"linkage": [[label(v) for v in p] for p in self.paths]}
            if self.paths is not None
            else {"obstruction": self.obstruction.to_json(label)}
        )
        return {
            "instance": self.instance,
            "result": result,
            "trace": list(self.trace),
            "valid": self.valid,
        }

"""Deterministic train/val/test assignment (80/10/10)."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

SPLIT_SHARES = (("train", 0.8), ("val", 0.1), ("test", 0.1))


@dataclass
class SplitAssignment:
    assignment: dict[str, str]  # sequence id -> "train" | "val" | "test"
    seed: int

    def ids(self, split: str) -> list[str]:
        return sorted(k for k, v in self.assignment.items() if v == split)

    def counts(self) -> dict[str, int]:
        out = {name: 0 for name, _ in SPLIT_SHARES}
        for v in self.assignment.values():
            out[v] += 1
        return out


def _rank_key(seq_id: str, seed: int) -> int:
    digest = hashlib.sha256(f"{seed}:{seq_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def assign_splits(ids, seed: int = 0) -> SplitAssignment:
    """Hash-order the ids, then allocate 80/10/10 by largest remainder.

    A pure function of (id, seed): independent of input order, exact to
    +-1 item per bucket (independent hash binning would only be binomial).
    """
    ids = [str(i) for i in ids]
    if len(set(ids)) != len(ids):
        raise ValueError("sequence ids must be unique")
    ranked = sorted(ids, key=lambda i: (_rank_key(i, seed), i))
    n = len(ranked)

    quotas = []
    for name, share in SPLIT_SHARES:
        exact = share * n
        quotas.append([name, int(exact), exact - int(exact)])
    remaining = n - sum(q[1] for q in quotas)
    for q in sorted(quotas, key=lambda q: -q[2])[:remaining]:
        q[1] += 1

    assignment = {}
    pos = 0
    for name, count, _ in quotas:
        for seq_id in ranked[pos:pos + count]:
            assignment[seq_id] = name
        pos += count
    return SplitAssignment(assignment=assignment, seed=seed)

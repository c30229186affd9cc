"""Relaxation engine: prefix relaxations, block-assignment enumeration, and the
axiom-membership test "some false low-alternation relaxation of the instantiated QBC".

Relaxations are enumerated as block assignments rather than permutations:
truth is invariant under reordering inside a quantifier block, so block
assignments are complete representatives (at a fraction of the cost).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from .core import (
    DEFAULT_LIMITS,
    EXISTS,
    FORALL,
    QBC,
    Limits,
    Prefix,
    canon,
    clause_of,
    instantiate,
)
from .semantics import decide


def is_relaxation(relaxed: Prefix, original: Prefix) -> bool:
    """Whether ``relaxed`` permutes ``original`` preserving every
    universal-before-existential order constraint."""
    if sorted(relaxed.entries) != sorted(original.entries):
        return False
    for y in original.forall_vars():
        for x in original.exists_vars():
            if original.preceq(y, x) and not relaxed.preceq(y, x):
                return False
    return True


def canonical_pi2(prefix: Prefix) -> Prefix:
    """All universal entries first (original order), then all existential entries."""
    fa = [(q, v) for q, v in prefix.entries if q == FORALL]
    ex = [(q, v) for q, v in prefix.entries if q == EXISTS]
    return Prefix(tuple(fa + ex))


@dataclass(frozen=True)
class BlockAssignment:
    """Map from variables to target blocks 1..k of a forall*-exists*-... pattern.

    Universal variables sit in odd blocks, existential ones in even blocks, and
    every universal constrained to stay before an existential lands in a
    strictly earlier block.
    """

    k: int
    assignment: tuple[tuple[int, int], ...]

    def block_of(self) -> dict[int, int]:
        return dict(self.assignment)

    def realize(self, prefix: Prefix) -> Prefix:
        """The relaxed prefix: variables sorted by block, original order within."""
        block = self.block_of()
        order = sorted(range(len(prefix.entries)), key=lambda i: (block[prefix.entries[i][1]], i))
        return Prefix(tuple(prefix.entries[i] for i in order))


def enumerate_pik(prefix: Prefix, k: int) -> Iterator[BlockAssignment]:
    """All parity- and constraint-respecting block assignments, each exactly once.

    Universal variables are tried latest-block-first (falsity tends to show up
    with late universals); this only affects short-circuit order, never the set.
    """
    if k < 2:
        raise ValueError("alternation count must be at least 2")
    entries = prefix.entries
    odd_desc = tuple(range(k if k % 2 == 1 else k - 1, 0, -2))
    acc: list[tuple[int, int]] = []

    def rec(i: int, max_forall_block: int) -> Iterator[BlockAssignment]:
        if i == len(entries):
            yield BlockAssignment(k, tuple(acc))
            return
        q, v = entries[i]
        if q == FORALL:
            for b in odd_desc:
                acc.append((v, b))
                yield from rec(i + 1, max(max_forall_block, b))
                acc.pop()
        else:
            for b in range(2, k + 1, 2):
                if b > max_forall_block:
                    acc.append((v, b))
                    yield from rec(i + 1, max_forall_block)
                    acc.pop()

    yield from rec(0, 0)


def relaxations_pik(qbc: QBC, k: int) -> Iterator[QBC]:
    for ba in enumerate_pik(qbc.prefix, k):
        yield QBC(qbc.names, ba.realize(qbc.prefix), qbc.matrix, qbc.clauses)


def has_false_relaxation(
    qbc: QBC, a: Mapping[int, int], k: int, limits: Limits = DEFAULT_LIMITS
) -> bool:
    """Membership of clause(a) in the level-k relaxation axiom set: does some
    enumerated relaxation of the instantiated QBC come out false?"""
    inst = instantiate(qbc, dict(a))
    for relaxed in relaxations_pik(inst, k):
        if not decide(relaxed, limits):
            return True
    return False


def holes(prefix: Prefix, a: Mapping[int, int]) -> set[int]:
    """Variables up to (the block of) the last assigned one that a leaves unset."""
    if not a:
        raise ValueError("holes of an empty assignment are undefined")
    last = prefix.last(a)
    return {v for v in prefix.variables if prefix.preceq(v, last)} - set(a)


class RelaxationAxioms:
    """Cached axiom oracle backed by :func:`has_false_relaxation` at a fixed level.

    ``cost`` counts relaxation decides actually performed; cache hits are free.
    """

    def __init__(self, qbc: QBC, m: int, limits: Limits = DEFAULT_LIMITS):
        if m < 2:
            raise ValueError("alternation count must be at least 2")
        self.qbc = qbc
        self.m = m
        self.limits = limits
        self.cost = 0
        self._cache: dict[tuple[tuple[int, int], ...], bool] = {}

    def contains_assignment(self, a: Mapping[int, int]) -> bool:
        key = canon(a)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        inst = instantiate(self.qbc, dict(a))
        result = False
        for relaxed in relaxations_pik(inst, self.m):
            self.cost += 1
            if not decide(relaxed, self.limits):
                result = True
                break
        self._cache[key] = result
        return result

    def contains(self, cl: frozenset[int]) -> bool:
        from .core import assignment_of

        return self.contains_assignment(assignment_of(cl))

    def falsified_member(self, a: Mapping[int, int]) -> frozenset[int] | None:
        return clause_of(a) if self.contains_assignment(a) else None

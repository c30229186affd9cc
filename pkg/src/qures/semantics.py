"""Ground-truth oracle: exhaustive truth evaluation of QBCs and explicit strategies.

The decider is a memoized game-tree recursion over the prefix; it either
answers exactly or raises :class:`ResourceLimitError`, never approximates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .core import (
    DEFAULT_LIMITS,
    EXISTS,
    FORALL,
    QBC,
    Assignment,
    Limits,
    eval_circuit,
    eval_circuit3,
)
from .errors import ResourceLimitError


class Decider:
    """Shared-memo game evaluator for one QBC.

    The memo key is the prefix position together with the current values of
    the variables the matrix actually depends on (the output-cone support).
    """

    def __init__(self, qbc: QBC, limits: Limits = DEFAULT_LIMITS):
        if len(qbc.prefix) > limits.max_decide_vars:
            raise ResourceLimitError(
                f"{len(qbc.prefix)} variables exceed the decide cap of {limits.max_decide_vars}"
            )
        self.qbc = qbc
        self.entries = qbc.prefix.entries
        self.support = sorted(qbc.matrix.support)
        self.memo: dict[tuple, bool] = {}

    def fresh_values(self) -> list[int | None]:
        return [None] * len(self.qbc.names)

    def value(self, values: list[int | None], i: int) -> bool:
        """Truth value of the game from prefix position ``i`` under ``values``."""
        v3 = eval_circuit3(self.qbc.matrix, values)
        if v3 is not None:
            return bool(v3)
        q, v = self.entries[i]
        if values[v] is not None:
            return self.value(values, i + 1)
        if v not in self.qbc.matrix.support:
            return self.value(values, i + 1)
        key = (i, tuple(values[s] for s in self.support))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        values[v] = 0
        r0 = self.value(values, i + 1)
        if (q == EXISTS and r0) or (q == FORALL and not r0):
            result = r0
        else:
            values[v] = 1
            result = self.value(values, i + 1)
        values[v] = None
        self.memo[key] = result
        return result


def decide(qbc: QBC, limits: Limits = DEFAULT_LIMITS) -> bool:
    """True iff a winning existential strategy exists (exhaustive, exact)."""
    d = Decider(qbc, limits)
    return d.value(d.fresh_values(), 0)


@dataclass(frozen=True)
class ExistsStrategy:
    """Per existential variable, a full table over the universal variables before it."""

    variables: tuple[int, ...]
    opposing_vars: tuple[int, ...]
    inputs: dict[int, tuple[int, ...]]
    tables: dict[int, dict[tuple[int, ...], int]]


@dataclass(frozen=True)
class ForallStrategy:
    """Per universal variable, a full table over the existential variables before it."""

    variables: tuple[int, ...]
    opposing_vars: tuple[int, ...]
    inputs: dict[int, tuple[int, ...]]
    tables: dict[int, dict[tuple[int, ...], int]]


Strategy = ExistsStrategy | ForallStrategy


def _predecessors(qbc: QBC, var: int, kind: str) -> tuple[int, ...]:
    """Variables of quantifier ``kind`` strictly before ``var``, in prefix order."""
    pos = qbc.prefix.position[var]
    return tuple(
        v
        for q, v in qbc.prefix.entries[:pos]
        if q == kind and qbc.prefix.strictly_before(v, var)
    )


def extract_strategy(qbc: QBC, limits: Limits = DEFAULT_LIMITS) -> Strategy:
    """A winning strategy for the winning side; ties broken toward value 0."""
    decider = Decider(qbc, limits)
    truth = decider.value(decider.fresh_values(), 0)
    own_kind = EXISTS if truth else FORALL
    opp_kind = FORALL if truth else EXISTS
    own = tuple(v for q, v in qbc.prefix.entries if q == own_kind)
    opp = tuple(v for q, v in qbc.prefix.entries if q == opp_kind)
    inputs: dict[int, tuple[int, ...]] = {}
    tables: dict[int, dict[tuple[int, ...], int]] = {}
    for var in own:
        preds = _predecessors(qbc, var, opp_kind)
        if len(preds) > limits.max_strategy_inputs:
            raise ResourceLimitError(
                f"variable {var} has {len(preds)} opposing predecessors; "
                f"table cap is {limits.max_strategy_inputs}"
            )
        inputs[var] = preds
        pos = qbc.prefix.position[var]
        table: dict[tuple[int, ...], int] = {}
        for row in itertools.product((0, 1), repeat=len(preds)):
            values = decider.fresh_values()
            for y, b in zip(preds, row):
                values[y] = b
            for q, v in qbc.prefix.entries[:pos]:
                if q == own_kind:
                    values[v] = tables[v][tuple(values[y] for y in inputs[v])]
            values[var] = 0
            wins0 = decider.value(values, pos + 1) == truth
            if wins0:
                choice = 0
            else:
                values[var] = 1
                wins1 = decider.value(values, pos + 1) == truth
                choice = 1 if wins1 else 0
            table[row] = choice
        tables[var] = table
    if truth:
        return ExistsStrategy(own, opp, inputs, tables)
    return ForallStrategy(own, opp, inputs, tables)


def play(strategy: Strategy, opposing: Mapping[int, int]) -> Assignment:
    """Compose the strategy with a total assignment of the opposing side."""
    if set(opposing) != set(strategy.opposing_vars):
        raise ValueError("opposing assignment must cover exactly the other side's variables")
    f: Assignment = dict(opposing)
    for var in strategy.variables:
        row = tuple(f[y] for y in strategy.inputs[var])
        table = strategy.tables[var]
        if row not in table:
            raise ValueError(f"strategy table for variable {var} misses row {row}")
        f[var] = table[row]
    return f


def verify_strategy(qbc: QBC, strategy: Strategy, limits: Limits = DEFAULT_LIMITS) -> bool:
    """Exhaustively quantify over the opposing side; True iff the strategy wins."""
    winning_value = 1 if isinstance(strategy, ExistsStrategy) else 0
    own_kind = EXISTS if isinstance(strategy, ExistsStrategy) else FORALL
    opp_kind = FORALL if own_kind == EXISTS else EXISTS
    expected_own = tuple(v for q, v in qbc.prefix.entries if q == own_kind)
    expected_opp = tuple(v for q, v in qbc.prefix.entries if q == opp_kind)
    if strategy.variables != expected_own or set(strategy.opposing_vars) != set(expected_opp):
        raise ValueError("strategy variables do not match the QBC prefix")
    for var in strategy.variables:
        if strategy.inputs[var] != _predecessors(qbc, var, opp_kind):
            raise ValueError(f"strategy inputs for variable {var} do not match the prefix")
    if len(expected_opp) > limits.max_decide_vars:
        raise ResourceLimitError(
            f"{len(expected_opp)} opposing variables exceed the cap of {limits.max_decide_vars}"
        )
    for row in itertools.product((0, 1), repeat=len(expected_opp)):
        f = play(strategy, dict(zip(expected_opp, row)))
        if eval_circuit(qbc.matrix, f) != winning_value:
            return False
    return True

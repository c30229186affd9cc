"""Syntax layer: prefixes, clauses, assignments, circuits, and instantiation.

Variables are interned to dense non-negative integer ids per QBC; a literal on
variable ``v`` is encoded as the integer ``v + 1`` (positive occurrence) or
``-(v + 1)`` (negated occurrence).  A clause is a ``frozenset`` of such
literals, a partial assignment a ``dict`` mapping variable ids to 0/1.  All
values are immutable after construction and every operation is pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Mapping

FORALL = "a"
EXISTS = "e"

Clause = frozenset[int]
Assignment = dict[int, int]

EMPTY_CLAUSE: Clause = frozenset()


def lit(var: int, value_falsified: int) -> int:
    """Literal on ``var`` that is falsified when the variable takes ``value_falsified``."""
    return var + 1 if value_falsified == 0 else -(var + 1)


def lit_var(literal: int) -> int:
    return abs(literal) - 1


def clause(literals: Iterable[int]) -> Clause:
    """Build a clause, rejecting complementary literal pairs."""
    lits = frozenset(literals)
    for l in lits:
        if -l in lits:
            raise ValueError(f"tautological clause: complementary literals on variable {lit_var(l)}")
    return lits


def assignment_of(c: Clause) -> Assignment:
    """The unique assignment on vars(c) under which c evaluates to false."""
    return {lit_var(l): (0 if l > 0 else 1) for l in c}


def clause_of(a: Mapping[int, int]) -> Clause:
    """The unique clause on dom(a) that evaluates to false under a."""
    return frozenset(lit(v, val) for v, val in a.items())


def canon(a: Mapping[int, int]) -> tuple[tuple[int, int], ...]:
    """Hashable canonical form of an assignment."""
    return tuple(sorted(a.items()))


def resolve(c1: Clause, c2: Clause, var: int) -> Clause:
    """Resolvent of c1 and c2 on ``var``; rejects non-complementary pivots and tautologies."""
    pos, neg = var + 1, -(var + 1)
    if pos in c1 and neg in c2:
        l1, l2 = pos, neg
    elif neg in c1 and pos in c2:
        l1, l2 = neg, pos
    else:
        raise ValueError(f"variable {var} does not occur complementarily in the premises")
    return clause((c1 - {l1}) | (c2 - {l2}))


class Order(Enum):
    STRICTLY_BEFORE = "strictly_before"
    SAME_BLOCK = "same_block"
    STRICTLY_AFTER = "strictly_after"


@dataclass(frozen=True)
class Prefix:
    """A quantifier prefix: an ordered tuple of (quantifier, variable id) pairs."""

    entries: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for q, v in self.entries:
            if q not in (FORALL, EXISTS):
                raise ValueError(f"unknown quantifier {q!r}")
            if v in seen:
                raise ValueError(f"repeated variable {v} in prefix")
            seen.add(v)

    def __len__(self) -> int:
        return len(self.entries)

    @cached_property
    def variables(self) -> tuple[int, ...]:
        return tuple(v for _, v in self.entries)

    @cached_property
    def position(self) -> dict[int, int]:
        return {v: i for i, (_, v) in enumerate(self.entries)}

    @cached_property
    def quantifier(self) -> dict[int, str]:
        return {v: q for q, v in self.entries}

    @cached_property
    def block_index(self) -> dict[int, int]:
        """Variable id -> index of its quantifier block (maximal equal-quantifier run)."""
        out: dict[int, int] = {}
        block = -1
        prev = None
        for q, v in self.entries:
            if q != prev:
                block += 1
                prev = q
            out[v] = block
        return out

    def contains(self, var: int) -> bool:
        return var in self.position

    def order_relation(self, u: int, v: int) -> Order:
        """Relative prefix order of two variables: before / same block / after."""
        for w in (u, v):
            if w not in self.position:
                raise ValueError(f"variable {w} does not occur in the prefix")
        bu, bv = self.block_index[u], self.block_index[v]
        if bu == bv:
            return Order.SAME_BLOCK
        return Order.STRICTLY_BEFORE if bu < bv else Order.STRICTLY_AFTER

    def preceq(self, u: int, v: int) -> bool:
        return self.order_relation(u, v) is not Order.STRICTLY_AFTER

    def strictly_before(self, u: int, v: int) -> bool:
        return self.order_relation(u, v) is Order.STRICTLY_BEFORE

    def set_preceq(self, vars_: Iterable[int], v: int) -> bool:
        """Set lifting: every u in vars_ satisfies u preceq v (vacuous for empty sets)."""
        return all(self.preceq(u, v) for u in vars_)

    def last(self, vars_: Iterable[int]) -> int:
        """The variable among vars_ appearing last in the prefix."""
        vs = list(vars_)
        if not vs:
            raise ValueError("last() of an empty variable set is undefined")
        return max(vs, key=lambda v: self.position[v])

    def forall_vars(self) -> tuple[int, ...]:
        return tuple(v for q, v in self.entries if q == FORALL)

    def exists_vars(self) -> tuple[int, ...]:
        return tuple(v for q, v in self.entries if q == EXISTS)


def quantifier_blocks(prefix: Prefix) -> list[tuple[str, tuple[int, ...]]]:
    """Maximal runs of equally quantified variables, in prefix order."""
    blocks: list[tuple[str, tuple[int, ...]]] = []
    for q, group in itertools.groupby(prefix.entries, key=lambda e: e[0]):
        blocks.append((q, tuple(v for _, v in group)))
    return blocks


def prefix_class(prefix: Prefix) -> tuple[int, int]:
    """Smallest (i, j) such that the quantifier string is Pi_i and Sigma_j.

    Pi_i means membership in forall* exists* forall* ... with i starred groups;
    Sigma_j starts with exists*.  The empty prefix is (0, 0) by convention.
    """
    blocks = quantifier_blocks(prefix)
    m = len(blocks)
    if m == 0:
        return (0, 0)
    pi = m if blocks[0][0] == FORALL else m + 1
    sigma = m if blocks[0][0] == EXISTS else m + 1
    return (pi, sigma)


# Circuit nodes are tuples: ("const", 0|1), ("var", var_id),
# ("not", arg_index), ("and", args_tuple), ("or", args_tuple).
# Node references point to earlier nodes only.


@dataclass(frozen=True)
class Circuit:
    ops: tuple[tuple, ...]
    output: int

    def __post_init__(self) -> None:
        for i, op in enumerate(self.ops):
            kind = op[0]
            if kind == "not":
                refs: tuple[int, ...] = (op[1],)
            elif kind in ("and", "or"):
                refs = op[1]
            elif kind in ("const", "var"):
                refs = ()
            else:
                raise ValueError(f"unknown gate kind {kind!r}")
            for r in refs:
                if not 0 <= r < i:
                    raise ValueError(f"gate {i} references non-earlier gate {r}")
        if not 0 <= self.output < len(self.ops):
            raise ValueError("output reference out of range")

    @cached_property
    def support(self) -> frozenset[int]:
        """Variables in the cone of the output gate."""
        needed = [False] * len(self.ops)
        needed[self.output] = True
        out: set[int] = set()
        for i in range(len(self.ops) - 1, -1, -1):
            if not needed[i]:
                continue
            op = self.ops[i]
            if op[0] == "var":
                out.add(op[1])
            elif op[0] == "not":
                needed[op[1]] = True
            elif op[0] in ("and", "or"):
                for r in op[1]:
                    needed[r] = True
        return frozenset(out)


class CircuitBuilder:
    """Incremental construction of a topologically ordered circuit."""

    def __init__(self) -> None:
        self.ops: list[tuple] = []
        self._cache: dict[tuple, int] = {}

    def _add(self, op: tuple) -> int:
        idx = self._cache.get(op)
        if idx is None:
            self.ops.append(op)
            idx = len(self.ops) - 1
            self._cache[op] = idx
        return idx

    def const(self, value: int) -> int:
        return self._add(("const", int(value)))

    def var(self, var_id: int) -> int:
        return self._add(("var", var_id))

    def not_(self, arg: int) -> int:
        return self._add(("not", arg))

    def and_(self, args: Iterable[int]) -> int:
        return self._add(("and", tuple(args)))

    def or_(self, args: Iterable[int]) -> int:
        return self._add(("or", tuple(args)))

    def literal(self, literal: int) -> int:
        v = self.var(lit_var(literal))
        return v if literal > 0 else self.not_(v)

    def build(self, output: int) -> Circuit:
        return Circuit(tuple(self.ops), output)


def circuit_of_clauses(clauses: Iterable[Clause]) -> Circuit:
    """And-of-Ors circuit for a clause list (the clausal matrix shape)."""
    b = CircuitBuilder()
    tops = [b.or_(b.literal(l) for l in sorted(cl, key=abs)) for cl in clauses]
    return b.build(b.and_(tops))


def eval_circuit(circuit: Circuit, a: Mapping[int, int]) -> int:
    """Evaluate under a total assignment of the support; missing variables are an error."""
    vals: list[int] = []
    for op in circuit.ops:
        kind = op[0]
        if kind == "const":
            vals.append(op[1])
        elif kind == "var":
            if op[1] not in a:
                raise ValueError(f"assignment does not cover variable {op[1]}")
            vals.append(a[op[1]])
        elif kind == "not":
            vals.append(1 - vals[op[1]])
        elif kind == "and":
            vals.append(int(all(vals[r] for r in op[1])))
        else:
            vals.append(int(any(vals[r] for r in op[1])))
    return vals[circuit.output]


def eval_circuit3(circuit: Circuit, values: list[int | None]) -> int | None:
    """Three-valued evaluation under a partial assignment (None = unset).

    Returns 0/1 when the output is already determined, else None.
    """
    vals: list[int | None] = []
    for op in circuit.ops:
        kind = op[0]
        if kind == "const":
            vals.append(op[1])
        elif kind == "var":
            vals.append(values[op[1]])
        elif kind == "not":
            x = vals[op[1]]
            vals.append(None if x is None else 1 - x)
        elif kind == "and":
            acc: int | None = 1
            for r in op[1]:
                x = vals[r]
                if x == 0:
                    acc = 0
                    break
                if x is None:
                    acc = None
            vals.append(acc)
        else:
            acc = 0
            for r in op[1]:
                x = vals[r]
                if x == 1:
                    acc = 1
                    break
                if x is None:
                    acc = None
            vals.append(acc)
    return vals[circuit.output]


@dataclass(frozen=True)
class QBC:
    """A quantified Boolean circuit: prefix plus matrix over interned variables.

    ``names`` maps variable ids to display strings; ``clauses`` is the optional
    clausal view, present exactly when the matrix is a conjunction of clauses.
    """

    names: tuple[str, ...]
    prefix: Prefix
    matrix: Circuit
    clauses: tuple[Clause, ...] | None = None

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be unique")
        known = set(range(len(self.names)))
        if not set(self.prefix.variables) <= known:
            raise ValueError("prefix references unknown variable ids")
        if not self.matrix.support <= set(self.prefix.variables):
            raise ValueError("matrix mentions variables outside the prefix")

    @cached_property
    def var_by_name(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    def n_vars(self) -> int:
        return len(self.prefix)


def make_clausal_qbc(names: Iterable[str], entries: Iterable[tuple[str, int]], clauses: Iterable[Clause]) -> QBC:
    cls = tuple(clauses)
    return QBC(tuple(names), Prefix(tuple(entries)), circuit_of_clauses(cls), cls)


def eval_matrix(qbc: QBC, a: Mapping[int, int]) -> int:
    return eval_circuit(qbc.matrix, a)


def substitute(circuit: Circuit, a: Mapping[int, int]) -> Circuit:
    """Replace assigned variables by constants; no other rewriting."""
    ops = tuple(
        ("const", a[op[1]]) if op[0] == "var" and op[1] in a else op
        for op in circuit.ops
    )
    return Circuit(ops, circuit.output)


def instantiate(qbc: QBC, a: Mapping[int, int]) -> QBC:
    """The QBC obtained by instantiating ``a``: assigned variables disappear from
    the prefix, every variable strictly before the last assigned one becomes
    existential, and the matrix has the assigned values substituted."""
    if not set(a) <= set(qbc.prefix.variables):
        raise ValueError("assignment domain not contained in the prefix")
    if not a:
        return qbc
    last = qbc.prefix.last(a)
    entries = []
    for q, v in qbc.prefix.entries:
        if v in a:
            continue
        if qbc.prefix.strictly_before(v, last):
            q = EXISTS
        entries.append((q, v))
    new_clauses = None
    if qbc.clauses is not None:
        new_clauses = tuple(_restrict_clauses(qbc.clauses, a))
    return QBC(qbc.names, Prefix(tuple(entries)), substitute(qbc.matrix, a), new_clauses)


def _restrict_clauses(clauses: Iterable[Clause], a: Mapping[int, int]) -> Iterator[Clause]:
    falsifying = {lit(v, val) for v, val in a.items()}
    for cl in clauses:
        kept = []
        satisfied = False
        for l in cl:
            v = lit_var(l)
            if v in a:
                if l not in falsifying:
                    satisfied = True
                    break
            else:
                kept.append(l)
        if not satisfied:
            yield frozenset(kept)


def is_semicompletion(prefix: Prefix, f: Mapping[int, int], g: Mapping[int, int]) -> bool:
    """Whether g extends f while keeping unset (and after dom(g)) every
    universal variable that was unset and after dom(f)."""
    for v, val in f.items():
        if g.get(v) != val:
            return False
    dom_f = f.keys()
    for y in prefix.forall_vars():
        if y not in dom_f and prefix.set_preceq(dom_f, y):
            if y in g or not prefix.set_preceq(g.keys(), y):
                return False
    return True


@dataclass(frozen=True)
class Limits:
    """Caps for the exhaustive routines; exceeding one raises ResourceLimitError."""

    max_decide_vars: int = 26
    max_strategy_inputs: int = 20


DEFAULT_LIMITS = Limits()

"""Resolution/universal-elimination proof objects, the annotated-line checker,
the relaxation-parameterized ensemble check, and the graph view of proofs.

A proof is a sequence of clauses where every line carries its justification:
axiom membership, resolvent of two earlier lines on a pivot variable, or
elimination of one universal literal from an earlier line.  The checker never
searches for justifications.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Protocol

from .core import (
    DEFAULT_LIMITS,
    EXISTS,
    FORALL,
    QBC,
    Assignment,
    Clause,
    Limits,
    assignment_of,
    canon,
    clause_of,
    lit,
    lit_var,
    resolve,
)
from .errors import ResourceLimitError
from .relax import RelaxationAxioms
from .semantics import Decider


@dataclass(frozen=True)
class Axiom:
    pass


@dataclass(frozen=True)
class Resolve:
    left: int
    right: int
    pivot: int


@dataclass(frozen=True)
class ForallElim:
    source: int
    literal: int


Justification = Axiom | Resolve | ForallElim


@dataclass(frozen=True)
class ProofLine:
    clause: Clause
    justification: Justification


@dataclass(frozen=True)
class Proof:
    lines: tuple[ProofLine, ...]

    def __post_init__(self) -> None:
        if not self.lines:
            raise ValueError("a proof must contain at least one clause")
        for i, line in enumerate(self.lines):
            j = line.justification
            refs = _refs(j)
            for r in refs:
                if not 0 <= r < i:
                    raise ValueError(f"line {i + 1} references line {r + 1}, which is not earlier")

    @property
    def size(self) -> int:
        return len(self.lines)

    def conclusion(self) -> Clause:
        return self.lines[-1].clause


def _refs(j: Justification) -> tuple[int, ...]:
    if isinstance(j, Resolve):
        return (j.left, j.right)
    if isinstance(j, ForallElim):
        return (j.source,)
    return ()


class AxiomOracle(Protocol):
    cost: int

    def contains(self, cl: Clause) -> bool: ...

    def falsified_member(self, a: Mapping[int, int]) -> Clause | None: ...


class ExplicitAxioms:
    """Axiom oracle backed by an explicit clause set."""

    def __init__(self, clauses: Iterable[Clause]):
        self.clauses = frozenset(clauses)
        self.cost = 0

    def contains(self, cl: Clause) -> bool:
        self.cost += 1
        return cl in self.clauses

    def falsified_member(self, a: Mapping[int, int]) -> Clause | None:
        falsified = {lit(v, val) for v, val in a.items()}
        for cl in self.clauses:
            self.cost += 1
            if cl <= falsified:
                return cl
        return None


class MatrixAxioms(ExplicitAxioms):
    """The clauses of a clausal QBC as the axiom set."""

    def __init__(self, qbc: QBC):
        if qbc.clauses is None:
            raise ValueError("matrix axioms need a clausal QBC")
        super().__init__(qbc.clauses)


@dataclass(frozen=True)
class CheckReport:
    valid: bool
    falsity_proof: bool
    size: int
    errors: tuple[tuple[int, str], ...]
    oracle_cost: tuple[int, ...]

    @property
    def first_error(self) -> str | None:
        if not self.errors:
            return None
        line_id, reason = self.errors[0]
        return f"line {line_id}: {reason}"


def check_proof(qbc: QBC, proof: Proof, oracle: AxiomOracle) -> CheckReport:
    """Validate every line against its annotation; failures land in the report."""
    errors: list[tuple[int, str]] = []
    costs: list[int] = []
    for i, line in enumerate(proof.lines):
        before = oracle.cost
        err = _check_line(qbc, proof, i)
        if err is None and isinstance(line.justification, Axiom):
            if not oracle.contains(line.clause):
                err = "clause is not in the axiom set"
        costs.append(oracle.cost - before)
        if err is not None:
            errors.append((i + 1, err))
    valid = not errors
    falsity = valid and not proof.conclusion()
    return CheckReport(valid, falsity, proof.size, tuple(errors), tuple(costs))


def _check_line(qbc: QBC, proof: Proof, i: int) -> str | None:
    prefix = qbc.prefix
    line = proof.lines[i]
    for l in line.clause:
        if not prefix.contains(lit_var(l)):
            return f"literal on variable {lit_var(l)} outside the prefix"
    j = line.justification
    if isinstance(j, Axiom):
        return None
    if isinstance(j, Resolve):
        try:
            expected = resolve(proof.lines[j.left].clause, proof.lines[j.right].clause, j.pivot)
        except ValueError as e:
            return f"illegal resolution: {e}"
        if expected != line.clause:
            return "clause is not the stated resolvent"
        return None
    if j.literal not in proof.lines[j.source].clause:
        return "eliminated literal does not occur in the source clause"
    y = lit_var(j.literal)
    if prefix.quantifier.get(y) != FORALL:
        return f"variable {y} is not universally quantified"
    rest = proof.lines[j.source].clause - {j.literal}
    if rest != line.clause:
        return "clause is not the source minus the eliminated literal"
    if not prefix.set_preceq({lit_var(l) for l in rest}, y):
        return f"remaining variables are not all at or before variable {y}"
    return None


class Outcome(Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    OVERFLOW = "oracle overflow"


@dataclass(frozen=True)
class RelaxingVerdict:
    outcome: Outcome
    report: CheckReport | None
    oracle_cost: int


def relaxing_check(
    k: int, qbc: QBC, proof: Proof, limits: Limits = DEFAULT_LIMITS
) -> RelaxingVerdict:
    """The parameterized ensemble check: accept iff the proof is a valid falsity
    proof from the level-(k+2) relaxation axiom set."""
    oracle = RelaxationAxioms(qbc, k + 2, limits)
    try:
        report = check_proof(qbc, proof, oracle)
    except ResourceLimitError:
        return RelaxingVerdict(Outcome.OVERFLOW, None, oracle.cost)
    outcome = Outcome.ACCEPT if report.valid and report.falsity_proof else Outcome.REJECT
    return RelaxingVerdict(outcome, report, oracle.cost)


Label = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ProofDag:
    """Graph view: one node per clause occurrence, labelled with the clause's
    falsifying assignment; edges run from a derived clause to its sources."""

    labels: tuple[Label, ...]
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.labels)
        if len(self.edges) != n:
            raise ValueError("labels and edge lists must have equal length")
        for i, out in enumerate(self.edges):
            if len(out) > 2:
                raise ValueError(f"node {i} has out-degree {len(out)}, at most 2 is allowed")
            for t in out:
                if not 0 <= t < n:
                    raise ValueError(f"node {i} has a dangling edge to {t}")
        state = [0] * n
        for root in range(n):
            if state[root]:
                continue
            stack: list[tuple[int, int]] = [(root, 0)]
            state[root] = 1
            while stack:
                u, nxt = stack[-1]
                if nxt == len(self.edges[u]):
                    state[u] = 2
                    stack.pop()
                    continue
                stack[-1] = (u, nxt + 1)
                t = self.edges[u][nxt]
                if state[t] == 1:
                    raise ValueError(f"cycle through node {u}")
                if state[t] == 0:
                    state[t] = 1
                    stack.append((t, 0))

    def in_degrees(self) -> list[int]:
        degrees = [0] * len(self.labels)
        for out in self.edges:
            for t in out:
                degrees[t] += 1
        return degrees

    def sinks(self) -> list[int]:
        return [i for i, out in enumerate(self.edges) if not out]


def build_graph(proof: Proof) -> tuple[ProofDag, tuple[str, ...]]:
    """The graph view of a proof plus any violations of the structural edge
    conditions (extension shape for one out-edge, resolution shape for two)."""
    labels = tuple(canon(assignment_of(line.clause)) for line in proof.lines)
    edges = tuple(_refs(line.justification) for line in proof.lines)
    dag = ProofDag(labels, edges)
    violations = []
    for i in range(len(labels)):
        err = _node_shape_error(dag, i)
        if err is not None:
            violations.append(f"node {i}: {err}")
    return dag, tuple(violations)


def _node_shape_error(dag: ProofDag, i: int) -> str | None:
    a = dict(dag.labels[i])
    out = dag.edges[i]
    if not out:
        return None
    if len(out) == 1:
        b = dict(dag.labels[out[0]])
        extra = set(b) - set(a)
        if len(extra) != 1:
            return "one out-edge but the source domain does not add exactly one variable"
        if any(b[v] != val for v, val in a.items()):
            return "one out-edge but the source does not extend the label"
        return None
    a1 = dict(dag.labels[out[0]])
    a2 = dict(dag.labels[out[1]])
    differing = [v for v in set(a1) & set(a2) if a1[v] != a2[v]]
    if len(differing) != 1:
        return "two out-edges but not exactly one variable differs between the sources"
    v = differing[0]
    if (set(a1) | set(a2)) - {v} != set(a):
        return "two out-edges but the source domains do not combine to the label domain"
    for src in (a1, a2):
        if any(a[w] != val for w, val in src.items() if w != v and w in a):
            return "two out-edges but the label disagrees with a source"
    return None


def graph_to_proof(qbc: QBC, dag: ProofDag) -> Proof:
    """Linearize a structurally valid labelled graph back into an annotated proof."""
    for i in range(len(dag.labels)):
        err = _node_shape_error(dag, i)
        if err is not None:
            raise ValueError(f"node {i}: {err}")
    order: list[int] = []
    seen = [False] * len(dag.labels)
    for root in range(len(dag.labels)):
        if seen[root]:
            continue
        seen[root] = True
        stack: list[tuple[int, int]] = [(root, 0)]
        while stack:
            u, nxt = stack[-1]
            if nxt == len(dag.edges[u]):
                order.append(u)
                stack.pop()
                continue
            stack[-1] = (u, nxt + 1)
            t = dag.edges[u][nxt]
            if not seen[t]:
                seen[t] = True
                stack.append((t, 0))
    index = {u: i for i, u in enumerate(order)}
    lines: list[ProofLine] = []
    for u in order:
        a = dict(dag.labels[u])
        cl = clause_of(a)
        out = dag.edges[u]
        if not out:
            lines.append(ProofLine(cl, Axiom()))
        elif len(out) == 1:
            b = dict(dag.labels[out[0]])
            (y,) = set(b) - set(a)
            lines.append(ProofLine(cl, ForallElim(index[out[0]], lit(y, b[y]))))
        else:
            a1, a2 = (dict(dag.labels[t]) for t in out)
            (v,) = [w for w in set(a1) & set(a2) if a1[w] != a2[w]]
            lines.append(ProofLine(cl, Resolve(index[out[0]], index[out[1]], v)))
    return Proof(tuple(lines))


@dataclass(frozen=True)
class ProofStats:
    size: int
    tree_like: bool
    sinks: int
    leaves: int


def proof_stats(proof: Proof) -> ProofStats:
    dag, _ = build_graph(proof)
    tree_like = all(d <= 1 for d in dag.in_degrees())
    sinks = len(dag.sinks())
    return ProofStats(proof.size, tree_like, sinks, sinks)


@dataclass
class _Node:
    clause: Clause
    rule: tuple


def generate_falsity_proof(qbc: QBC, oracle: AxiomOracle, limits: Limits = DEFAULT_LIMITS) -> Proof:
    """Tree-like falsity proof by recursive descent over the prefix: branch both
    values of each existential variable and resolve, follow a falsifying value
    of each universal variable and eliminate its literal, stop at oracle axioms."""
    decider = Decider(qbc, limits)
    values = decider.fresh_values()
    if decider.value(values, 0):
        raise ValueError("the QBC is true; it has no falsity proof")
    entries = qbc.prefix.entries

    def descend(i: int, a: Assignment) -> _Node:
        member = oracle.falsified_member(a)
        if member is not None:
            return _Node(member, ("ax",))
        if i == len(entries):
            raise ValueError("axiom oracle has no falsified member at a total assignment")
        q, v = entries[i]
        if q == EXISTS:
            values[v] = 0
            n0 = descend(i + 1, a | {v: 0})
            if lit(v, 0) not in n0.clause:
                values[v] = None
                return n0
            values[v] = 1
            n1 = descend(i + 1, a | {v: 1})
            values[v] = None
            if lit(v, 1) not in n1.clause:
                return n1
            return _Node(resolve(n0.clause, n1.clause, v), ("res", n0, n1, v))
        for b in (0, 1):
            values[v] = b
            if not decider.value(values, i + 1):
                sub = descend(i + 1, a | {v: b})
                values[v] = None
                l = lit(v, b)
                if l not in sub.clause:
                    return sub
                return _Node(sub.clause - {l}, ("ae", sub, l))
        raise AssertionError("false universal position has no falsifying value")

    root = descend(0, {})
    lines: list[ProofLine] = []

    def emit(node: _Node) -> int:
        if node.rule[0] == "ax":
            lines.append(ProofLine(node.clause, Axiom()))
        elif node.rule[0] == "res":
            left = emit(node.rule[1])
            right = emit(node.rule[2])
            lines.append(ProofLine(node.clause, Resolve(left, right, node.rule[3])))
        else:
            src = emit(node.rule[1])
            lines.append(ProofLine(node.clause, ForallElim(src, node.rule[2])))
        return len(lines) - 1

    emit(root)
    return Proof(tuple(lines))

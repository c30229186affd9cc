"""Prover-delayer game machinery for tree-like proofs.

The normative object is the point-scoring strategy: a set F of partial
assignments with a score function, subject to five conditions checked here by
exhaustive quantification over a materialized F.  The interactive referee is
an illustrative realization of the informal protocol, not the normative one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .core import QBC, Assignment, FORALL, Prefix, canon, is_semicompletion
from .errors import ResourceLimitError
from .proof import Proof, ProofDag, build_graph, proof_stats

Label = tuple[tuple[int, int], ...]
AxiomMembership = Callable[[Mapping[int, int]], bool]


@dataclass(frozen=True)
class DelayerStrategy:
    """Membership predicate and score over partial assignments, with a points claim.

    ``members`` is the materialized strategy set, needed because the
    existential conditions are checked by scanning it.
    """

    qbc: QBC
    p: int
    members: tuple[Label, ...]
    scores: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.p < 0:
            raise ValueError("claimed points must be non-negative")
        if len(self.members) != len(self.scores):
            raise ValueError("one score per member is required")

    def score_by_canon(self) -> dict[Label, int]:
        return dict(zip(self.members, self.scores))

    def is_member(self, a: Mapping[int, int]) -> bool:
        return canon(a) in self.score_by_canon()


class _MemberIndex:
    """Members with precomputed data for fast semicompletion scans."""

    def __init__(self, prefix: Prefix, strat: DelayerStrategy):
        self.prefix = prefix
        self.forall_vars = prefix.forall_vars()
        self.block = prefix.block_index
        self.entries = []
        for label, score in zip(strat.members, strat.scores):
            a = dict(label)
            max_block = max((self.block[v] for v in a), default=-1)
            self.entries.append((a, score, max_block))

    def _semicompletion_ok(self, h: Mapping[int, int], h_max_block: int, g: dict, g_max_block: int) -> bool:
        for v, val in h.items():
            if g.get(v) != val:
                return False
        for y in self.forall_vars:
            if y not in h and self.block[y] >= h_max_block:
                if y in g or g_max_block > self.block[y]:
                    return False
        return True

    def best_score(self, h: Mapping[int, int]) -> tuple[int, dict] | None:
        """Minimal-score member that is a semicompletion of h, scanned in member order."""
        h_max = max((self.block[v] for v in h), default=-1)
        best: tuple[int, dict] | None = None
        for g, score, g_max in self.entries:
            if best is not None and score >= best[0]:
                continue
            if len(g) < len(h):
                continue
            if self._semicompletion_ok(h, h_max, g, g_max):
                best = (score, g)
        return best


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    ok: bool
    counterexample: str | None


@dataclass(frozen=True)
class ConditionsReport:
    checks: tuple[ConditionCheck, ...]

    @property
    def all_ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failed(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.checks if not c.ok)


def _fmt(qbc: QBC, a: Mapping[int, int]) -> str:
    if not a:
        return "{}"
    items = sorted(a.items(), key=lambda kv: qbc.prefix.position.get(kv[0], kv[0]))
    return "{" + ", ".join(f"{qbc.names[v]}={val}" for v, val in items) + "}"


def check_conditions(
    qbc: QBC, axiom_member: AxiomMembership, strat: DelayerStrategy
) -> ConditionsReport:
    """Verify all five strategy conditions against a materialized member set.

    Universals range over the members and their restrictions/variables;
    existentials are resolved by scanning the member set for semicompletions.
    The first counterexample per condition is reported.
    """
    prefix = qbc.prefix
    index = _MemberIndex(prefix, strat)
    members = [(dict(label), score) for label, score in zip(strat.members, strat.scores)]
    checks: list[ConditionCheck] = []

    best_empty = index.best_score({})
    ok = best_empty is not None and best_empty[0] == 0
    checks.append(
        ConditionCheck(
            "semicompletion-of-empty",
            ok,
            None if ok else "no member is a zero-score semicompletion of the empty assignment",
        )
    )

    ce = None
    for f, score in members:
        if score < strat.p and axiom_member(f):
            ce = f"member {_fmt(qbc, f)} is in the axiom set but scores {score} < {strat.p}"
            break
    checks.append(ConditionCheck("all-points", ce is None, ce))

    ce = None
    seen_restrictions: set[Label] = set()
    for f, score in members:
        if ce:
            break
        dom = sorted(f)
        for mask in range(1 << len(dom)):
            h = {dom[i]: f[dom[i]] for i in range(len(dom)) if mask >> i & 1}
            key = canon(h)
            if key in seen_restrictions:
                continue
            seen_restrictions.add(key)
            best = index.best_score(h)
            bound = min(s for g, s in members if all(g.get(v) == val for v, val in h.items()))
            if best is None or best[0] > bound:
                ce = f"restriction {_fmt(qbc, h)} has no semicompletion of score <= {bound}"
                break
    checks.append(ConditionCheck("monotonicity", ce is None, ce))

    ce = None
    for f, score in members:
        if ce:
            break
        for y in prefix.forall_vars():
            if y in f or not prefix.set_preceq(f.keys(), y):
                continue
            for b in (0, 1):
                best = index.best_score(f | {y: b})
                if best is None or best[0] != score:
                    ce = (
                        f"{_fmt(qbc, f)} extended by {qbc.names[y]}={b} has no "
                        f"semicompletion of score {score}"
                    )
                    break
            if ce:
                break
    checks.append(ConditionCheck("forall-branching", ce is None, ce))

    ce = None
    for f, score in members:
        if ce:
            break
        for v in prefix.variables:
            if v in f:
                continue
            best = {b: index.best_score(f | {v: b}) for b in (0, 1)}

            def side_ok(b: int) -> bool:
                got = best[b]
                if got is None or got[0] > score + 1:
                    return False
                if got[0] <= score:
                    return True
                other = best[1 - b]
                return other is not None and other[0] <= score + 1

            if not (side_ok(0) or side_ok(1)):
                ce = f"{_fmt(qbc, f)} has no admissible extension on {qbc.names[v]}"
                break
    checks.append(ConditionCheck("double-branching", ce is None, ce))

    return ConditionsReport(tuple(checks))


def _monotonicity_bound(members: list[tuple[dict, int]], h: dict) -> int:
    return max(s for g, s in members if all(g.get(v) == val for v, val in h.items()))


@dataclass(frozen=True)
class DescentStep:
    node: int
    label: Label
    member: Label
    score: int


@dataclass(frozen=True)
class LeafBoundReport:
    leaves: int
    bound: int
    bound_holds: bool
    closure_ok: bool
    witness_ok: bool
    descent: tuple[DescentStep, ...]


def leaf_bound_audit(
    proof: Proof, strat: DelayerStrategy, axiom_member: AxiomMembership
) -> LeafBoundReport:
    """Check the minimum-leaf-count bound on a tree-like falsity proof and replay
    the score-guided root-to-leaf descent as an explicit witness."""
    stats = proof_stats(proof)
    if not stats.tree_like:
        raise ValueError("leaf bound audit requires a tree-like proof")
    if proof.conclusion():
        raise ValueError("leaf bound audit requires a falsity proof (empty final clause)")
    dag, _ = build_graph(proof)
    qbc = strat.qbc
    index = _MemberIndex(qbc.prefix, strat)

    closure_ok = True
    sinks = dag.sinks()
    for s in sinks[:16]:
        a = dict(dag.labels[s])
        if not axiom_member(a):
            continue
        for g, _, _ in index.entries:
            if is_semicompletion(qbc.prefix, a, g) and not axiom_member(g):
                closure_ok = False

    leaves = stats.sinks
    bound = 2**strat.p
    bound_holds = leaves >= bound

    node = len(dag.labels) - 1
    steps: list[DescentStep] = []
    witness_ok = True
    best = index.best_score(dict(dag.labels[node]))
    if best is None or best[0] != 0:
        witness_ok = False
    else:
        score, member = best
        steps.append(DescentStep(node, dag.labels[node], canon(member), score))
        while dag.edges[node]:
            choices = []
            for child in dag.edges[node]:
                got = index.best_score(dict(dag.labels[child]))
                if got is not None:
                    choices.append((got[0], child, got[1]))
            if not choices:
                witness_ok = False
                break
            new_score, child, member = min(choices, key=lambda c: (c[0], c[1]))
            if score < strat.p and new_score > score + 1:
                witness_ok = False
                break
            node = child
            score = new_score
            steps.append(DescentStep(node, dag.labels[node], canon(member), score))
        else:
            if score < strat.p:
                witness_ok = False

    return LeafBoundReport(leaves, bound, bound_holds, closure_ok, witness_ok, tuple(steps))


@dataclass(frozen=True)
class GameMove:
    action: str
    detail: str
    assignment: Label
    response: Label
    point_on: int | None


@dataclass(frozen=True)
class GameTranscript:
    moves: tuple[GameMove, ...]
    final: Label
    points: tuple[int, ...]
    reached_axiom_set: bool

    @property
    def rounds(self) -> int:
        return len(self.moves)

    def claimed_points(self) -> int:
        final_dom = {v for v, _ in self.final}
        return len([v for v in self.points if v in final_dom])


ProverAction = tuple  # ("restrict", keep_set) | ("assign", y, b) | ("select", v, preferred_b)
ProverPolicy = Callable[[QBC, Assignment, random.Random], ProverAction]


def random_prover(qbc: QBC, current: Assignment, rng: random.Random) -> ProverAction:
    """Uniformly picks a legal action; used to exercise the referee."""
    options: list[ProverAction] = []
    dom = sorted(current)
    if dom:
        keep = frozenset(v for v in dom if rng.random() < 0.5)
        options.append(("restrict", keep))
    eligible = [
        y
        for y in qbc.prefix.forall_vars()
        if y not in current and qbc.prefix.set_preceq(current.keys(), y)
    ]
    if eligible:
        options.append(("assign", rng.choice(eligible), rng.randrange(2)))
    unset = [v for v in qbc.prefix.variables if v not in current]
    if unset:
        options.append(("select", rng.choice(unset), rng.randrange(2)))
    if not options:
        raise ValueError("no legal prover action from a total assignment")
    return options[rng.randrange(len(options))]


def play_game(
    qbc: QBC,
    axiom_member: AxiomMembership,
    prover_policy: ProverPolicy,
    delayer: DelayerStrategy,
    max_rounds: int = 64,
    rng: random.Random | None = None,
) -> GameTranscript:
    """Referee for the interactive protocol (illustrative, not normative).

    Every delayer response is a minimal-score member semicompletion of the
    assignment produced by the prover's action; this is asserted per round.
    """
    rng = rng or random.Random(0)
    index = _MemberIndex(qbc.prefix, delayer)

    def respond(h: Assignment) -> tuple[Assignment, int]:
        best = index.best_score(h)
        if best is None:
            raise ValueError(f"delayer has no member semicompletion of {_fmt(qbc, h)}")
        score, member = best
        if not is_semicompletion(qbc.prefix, h, member):
            raise AssertionError("delayer response is not a semicompletion")
        return dict(member), score

    current, score = respond({})
    moves: list[GameMove] = []
    points: list[int] = []
    reached = axiom_member(current)
    while not reached and len(moves) < max_rounds:
        action = prover_policy(qbc, current, rng)
        kind = action[0]
        point_on: int | None = None
        if kind == "restrict":
            keep = set(action[1])
            if not keep <= set(current):
                raise ValueError("restriction must keep a subset of the current domain")
            h = {v: current[v] for v in keep}
            detail = f"keep {sorted(qbc.names[v] for v in keep)}"
        elif kind == "assign":
            y, b = action[1], action[2]
            if qbc.prefix.quantifier.get(y) != FORALL:
                raise ValueError(f"variable {qbc.names[y]} is not universal")
            if y in current or not qbc.prefix.set_preceq(current.keys(), y):
                raise ValueError(f"variable {qbc.names[y]} is not assignable here")
            h = current | {y: b}
            detail = f"{qbc.names[y]}={b}"
        elif kind == "select":
            v, preferred = action[1], action[2]
            if v in current:
                raise ValueError(f"variable {qbc.names[v]} is already assigned")
            options = {b: index.best_score(current | {v: b}) for b in (0, 1)}
            cheap = [b for b in (0, 1) if options[b] is not None and options[b][0] <= score]
            if cheap:
                b = cheap[0]
            else:
                b = preferred
                point_on = v
                points.append(v)
            h = current | {v: b}
            detail = f"{qbc.names[v]} -> {b}" + (" (choice)" if point_on is not None else "")
        else:
            raise ValueError(f"unknown prover action {kind!r}")
        before = canon(h)
        current, score = respond(h)
        moves.append(GameMove(kind, detail, before, canon(current), point_on))
        reached = axiom_member(current)
    return GameTranscript(tuple(moves), canon(current), tuple(points), reached)

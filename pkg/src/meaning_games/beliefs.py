"""Bounded nested-belief reasoning for players without common knowledge.

Without common knowledge of the game, each player simulates the other's
reasoning, which unrolls into an infinite tree of embedded viewpoints.  The
artifact truncates it: explicit level-0 anchors (the sender picks her
cheapest grammatical message, the receiver the most probable grammatical
content) plus alternating best responses up to a configured depth.  The
same evaluation runs over explicit belief trees, where each node carries
its own estimate of the game, and an observed message then refutes every
node whose implied sender strategy could never have produced it.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace
from typing import Iterator, Literal, Mapping

from .errors import InvalidGameError
from .equilibrium import OffPathRule, _off_path_row
from .game import (
    MeaningGame,
    Prior,
    ReceiverStrategy,
    SenderStrategy,
    _utility_unchecked,
)


MAX_DEPTH = 1000


@dataclass(frozen=True)
class LevelKConfig:
    depth: int = 4
    level0_sender: str = "cheapest-grammatical"
    level0_receiver: str = "prior-weighted-maximum"
    off_path: OffPathRule = "prior"

    def __post_init__(self):
        if not 0 <= self.depth <= MAX_DEPTH:
            raise InvalidGameError(f"depth must lie in 0..{MAX_DEPTH}")
        if self.level0_sender != "cheapest-grammatical":
            raise InvalidGameError(f"unknown level-0 sender {self.level0_sender!r}")
        if self.level0_receiver != "prior-weighted-maximum":
            raise InvalidGameError(f"unknown level-0 receiver {self.level0_receiver!r}")


def _level0_sender_map(g: MeaningGame) -> dict[str, str]:
    out = {}
    for c in g.content_ids():
        options = g.messages_for(c)
        out[c] = min(options, key=lambda m: (g.utility.sender_cost[(c, m)], m))
    return out


def _level0_receiver_map(g: MeaningGame) -> dict[str, str]:
    out = {}
    for m in g.message_ids():
        options = g.contents_for(m)
        if options:
            out[m] = min(options, key=lambda c: (-g.prior[c], c))
    return out


def _sender_best_response(
    g: MeaningGame, receiver_rows: Mapping[str, Mapping[str, float]]
) -> dict[str, str]:
    """Per content, the best grammatical message against the receiver,
    ties broken by lexicographic message id."""
    out = {}
    for c in g.content_ids():
        values = {}
        for m in g.messages_for(c):
            row = receiver_rows.get(m, {})
            values[m] = sum(
                p * _utility_unchecked(g, c, m, a, "S")
                for a, p in row.items()
                if p > 0.0 and (a, m) in g.edges
            )
        out[c] = min(values, key=lambda m: (-values[m], m))
    return out


def _receiver_best_response(
    g: MeaningGame, sender_rows: Mapping[str, Mapping[str, float]], rule: OffPathRule
) -> dict[str, str]:
    """Per message, the best content against Bayes beliefs about the sender,
    ties broken by lexicographic content id."""
    out = {}
    for m in g.message_ids():
        options = g.contents_for(m)
        if not options:
            continue
        joint = {
            c: g.prior[c] * sender_rows.get(c, {}).get(m, 0.0)
            for c in g.content_ids()
            if (c, m) in g.edges
        }
        denom = sum(joint.values())
        if denom > 0.0:
            belief = {c: w / denom for c, w in joint.items()}
        else:
            belief = _off_path_row(g, m, rule)
        values = {
            a: sum(
                p * _utility_unchecked(g, c, m, a, "R")
                for c, p in belief.items()
                if p > 0.0
            )
            for a in options
        }
        out[m] = min(values, key=lambda a: (-values[a], a))
    return out


@dataclass(frozen=True)
class LevelKResult:
    """The alternating best-response sequence and how it ended."""

    levels: tuple[tuple[SenderStrategy, ReceiverStrategy], ...]
    fixed_point_level: int | None
    cycle_start: int | None
    cycle_period: int | None

    @property
    def converged(self) -> bool:
        return self.fixed_point_level is not None

    @property
    def oscillating(self) -> bool:
        return self.cycle_period is not None and self.cycle_period > 1

    def fixed_profile(self) -> tuple[SenderStrategy, ReceiverStrategy]:
        if self.fixed_point_level is None:
            raise InvalidGameError("sequence did not reach a fixed profile")
        return self.levels[self.fixed_point_level]


def level_k_strategies(
    g_sender: MeaningGame, g_receiver: MeaningGame, cfg: LevelKConfig | None = None
) -> LevelKResult:
    """Run the truncated mutual-simulation dynamic.

    Level 0 plays the anchors.  Level k+1's sender best-responds (under her
    own estimate of the game) to the level-k receiver, and the receiver
    symmetrically to the level-k sender.  Both sequences advance in
    lockstep, so the result records, per level, one profile.  A fixed
    profile means the two strategies are mutual best responses under the
    respective estimates; a revisited non-fixed profile is an oscillation.
    """
    cfg = cfg or LevelKConfig()
    if set(g_sender.content_ids()) != set(g_receiver.content_ids()) or set(
        g_sender.message_ids()
    ) != set(g_receiver.message_ids()):
        raise InvalidGameError("the two game estimates use different alphabets")

    smap = _level0_sender_map(g_sender)
    rmap = _level0_receiver_map(g_receiver)
    levels = [(smap, rmap)]
    for _ in range(cfg.depth):
        prev_s, prev_r = levels[-1]
        next_s = _sender_best_response(
            g_sender, {m: {c: 1.0} for m, c in prev_r.items()}
        )
        next_r = _receiver_best_response(
            g_receiver, {c: {m: 1.0} for c, m in prev_s.items()}, cfg.off_path
        )
        levels.append((next_s, next_r))

    encodings = [
        (tuple(sorted(s.items())), tuple(sorted(r.items()))) for s, r in levels
    ]
    fixed = None
    for k in range(len(encodings) - 1):
        if encodings[k] == encodings[k + 1]:
            fixed = k
            break
    cycle_start = cycle_period = None
    if fixed is None:
        seen: dict[tuple, int] = {}
        for k, enc in enumerate(encodings):
            if enc in seen:
                cycle_start = seen[enc]
                cycle_period = k - seen[enc]
                break
            seen[enc] = k

    return LevelKResult(
        tuple(
            (SenderStrategy.deterministic(s), ReceiverStrategy.deterministic(r))
            for s, r in levels
        ),
        fixed,
        cycle_start,
        cycle_period,
    )


@dataclass(frozen=True)
class BeliefNode:
    """One embedded viewpoint: a player plus her estimate of the game.

    ``role`` "S" nodes stand for the sender intending ``anchor`` (a content
    id); "R" nodes for the receiver interpreting ``anchor`` (a message id).
    Children are the other player's viewpoints this node simulates; a node
    without children falls back to the level-0 anchor behavior under its
    own estimate.
    """

    role: Literal["S", "R"]
    anchor: str
    game_estimate: MeaningGame
    children: tuple["BeliefNode", ...] = ()

    def walk(self) -> Iterator["BeliefNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class _Implied:
    sender: dict[str, str]
    receiver: dict[str, str]


def _evaluate_node(node: BeliefNode) -> _Implied:
    g = node.game_estimate
    for child in node.children:
        if child.role == node.role:
            raise InvalidGameError("belief tree must alternate viewpoints")

    if node.role == "S":
        receiver = _level0_receiver_map(g)
        for child in node.children:
            receiver[child.anchor] = _evaluate_node(child).receiver[child.anchor]
        sender = _sender_best_response(g, {m: {c: 1.0} for m, c in receiver.items()})
        return _Implied(sender, receiver)

    sender = _level0_sender_map(g)
    for child in node.children:
        sender[child.anchor] = _evaluate_node(child).sender[child.anchor]
    receiver = _receiver_best_response(g, {c: {m: 1.0} for c, m in sender.items()}, "prior")
    return _Implied(sender, receiver)


def consistency_check(tree: BeliefNode, observed_message: str) -> list[BeliefNode]:
    """Refute embedded beliefs against an observed message.

    Every node implies a sender strategy: an S node implies its own choice
    rule, an R node the sender model it best-responds to.  A node is
    refuted exactly when that strategy sends the observed message with
    probability zero for every content, which proves the embedded estimate
    wrong once the message is common knowledge.
    """
    if observed_message not in set(tree.game_estimate.message_ids()):
        raise InvalidGameError(
            f"observed message {observed_message!r} is outside the root alphabet"
        )
    refuted = []
    for node in tree.walk():
        implied = _evaluate_node(node).sender
        if observed_message not in implied.values():
            refuted.append(node)
    return refuted


def prune_by_message(
    g: MeaningGame, observed_message: str, threshold: float = math.inf
) -> MeaningGame:
    """Restrict the game to what the observed message makes relevant.

    Association cost between neighbors is the mean of the two pair costs;
    a node's association with the observed message is its cheapest path
    cost in the bipartite graph.  Everything costlier than the threshold is
    excluded, so a finite threshold also restricts the game to the maximal
    connected subgraph containing the observed message.  An infinite
    threshold leaves the game unchanged.
    """
    if observed_message not in set(g.message_ids()):
        raise InvalidGameError(f"unknown message {observed_message!r}")
    if math.isinf(threshold):
        return g

    dist: dict[tuple[str, str], float] = {("m", observed_message): 0.0}
    frontier = [(0.0, "m", observed_message)]
    while frontier:
        d, kind, node = heapq.heappop(frontier)
        if d > dist.get((kind, node), math.inf):
            continue
        if kind == "m":
            neighbors = [
                (c, (g.utility.sender_cost[(c, node)] + g.utility.receiver_cost[(node, c)]) / 2.0)
                for c in g.contents_for(node)
            ]
            next_kind = "c"
        else:
            neighbors = [
                (m, (g.utility.sender_cost[(node, m)] + g.utility.receiver_cost[(m, node)]) / 2.0)
                for m in g.messages_for(node)
            ]
            next_kind = "m"
        for other, w in neighbors:
            nd = d + w
            if nd < dist.get((next_kind, other), math.inf):
                dist[(next_kind, other)] = nd
                heapq.heappush(frontier, (nd, next_kind, other))

    kept_c = [c for c in g.content_ids() if dist.get(("c", c), math.inf) <= threshold]
    kept_m = [m for m in g.message_ids() if dist.get(("m", m), math.inf) <= threshold]
    if not kept_c:
        raise InvalidGameError(
            f"threshold {threshold} prunes every content reachable from "
            f"{observed_message!r}"
        )

    kept_c_set, kept_m_set = set(kept_c), set(kept_m)
    u = g.utility
    sender_cost = {
        (c, m): v
        for (c, m), v in u.sender_cost.items()
        if c in kept_c_set and m in kept_m_set and (c, m) in g.edges
    }
    receiver_cost = {
        (m, c): v
        for (m, c), v in u.receiver_cost.items()
        if c in kept_c_set and m in kept_m_set and (c, m) in g.edges
    }
    overlap = None
    if u.bonus_overlap is not None:
        overlap = {
            (a, b): v
            for (a, b), v in u.bonus_overlap.items()
            if a in kept_c_set and b in kept_c_set
        }
    return MeaningGame(
        tuple(c for c in g.contents if c.id in kept_c_set),
        tuple(m for m in g.messages if m.id in kept_m_set),
        Prior.normalized({c: g.prior[c] for c in kept_c}),
        replace(
            u, sender_cost=sender_cost, receiver_cost=receiver_cost, bonus_overlap=overlap
        ),
    )

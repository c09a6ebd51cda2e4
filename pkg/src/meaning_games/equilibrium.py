"""Equilibrium analysis for meaning games.

Enumerates pure-strategy equilibria of the one-shot signaling game, checks
arbitrary profiles for mutual best response under explicit belief systems,
filters by Pareto dominance, and predicts play: games are expected to be
played at a Pareto-optimal equilibrium, and all maximal equilibria are
surfaced when several remain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Callable, Mapping

from .errors import InvalidGameError, NotApplicableError, SizeLimitError
from .game import (
    TOL,
    MeaningGame,
    Player,
    ReceiverStrategy,
    SenderStrategy,
    _utility_unchecked,
    _validate_receiver,
    _validate_sender,
    expected_utility,
    success_probability,
)

DEFAULT_CAP = 10_000_000

OffPathRule = str  # "prior" | "uniform"

BeliefBuilder = Callable[[SenderStrategy], "BeliefSystem"]


def _is_point_row(row: Mapping[str, float]) -> bool:
    return any(p >= 1.0 - TOL for p in row.values())


@dataclass(frozen=True)
class Profile:
    """A sender strategy paired with a receiver strategy."""

    sender: SenderStrategy
    receiver: ReceiverStrategy

    @property
    def deterministic(self) -> bool:
        return all(_is_point_row(r) for r in self.sender.rows.values()) and all(
            _is_point_row(r) for r in self.receiver.rows.values()
        )

    @staticmethod
    def from_maps(smap: Mapping[str, str], rmap: Mapping[str, str]) -> "Profile":
        return Profile(
            SenderStrategy.deterministic(dict(smap)),
            ReceiverStrategy.deterministic(dict(rmap)),
        )


@dataclass(frozen=True)
class BeliefSystem:
    """Receiver posteriors per message, with the off-path rule recorded.

    On-path messages carry the Bayes posterior induced by the prior and the
    sender strategy.  Off-path messages fall back to the rule: the prior or
    the uniform distribution, restricted to contents grammatical for the
    message.
    """

    posterior: Mapping[str, Mapping[str, float]]
    off_path_rule: OffPathRule
    on_path: frozenset[str] = frozenset()

    def at(self, mid: str) -> Mapping[str, float]:
        return self.posterior[mid]


@dataclass(frozen=True)
class Deviation:
    """A profitable unilateral deviation witnessing non-equilibrium."""

    player: Player
    at: str  # content id for the sender, message id for the receiver
    current: str
    better: str
    gain: float


@dataclass(frozen=True)
class EquilibriumCheck:
    ok: bool
    witness: Deviation | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class EquilibriumReport:
    profile: Profile
    beliefs: BeliefSystem
    success: float
    eu_sender: float
    eu_receiver: float
    kind: str  # "separating" | "pooling" | "partial"

    def sender_map(self) -> dict[str, str]:
        """Modal message per content (exact for deterministic profiles)."""
        return {
            c: max(row, key=lambda m: row[m]) for c, row in self.profile.sender.rows.items()
        }

    def receiver_map(self) -> dict[str, str]:
        return {
            m: max(row, key=lambda c: row[c])
            for m, row in self.profile.receiver.rows.items()
        }


def _off_path_row(g: MeaningGame, mid: str, rule: OffPathRule) -> dict[str, float]:
    eligible = g.contents_for(mid)
    if rule == "uniform":
        return {c: 1.0 / len(eligible) for c in eligible}
    if rule != "prior":
        raise InvalidGameError(f"unknown off-path rule {rule!r}")
    mass = {c: g.prior[c] for c in eligible}
    total = sum(mass.values())
    if total <= 0.0:
        # All grammatical contents have zero prior; nothing to restrict to.
        return {c: 1.0 / len(eligible) for c in eligible}
    return {c: w / total for c, w in mass.items()}


def posterior_beliefs(
    g: MeaningGame, s: SenderStrategy, rule: OffPathRule = "prior"
) -> BeliefSystem:
    """Bayes posteriors over contents for every message with an edge."""
    _validate_sender(g, s)
    posterior: dict[str, dict[str, float]] = {}
    on_path = set()
    for m in g.message_ids():
        eligible = g.contents_for(m)
        if not eligible:
            continue
        joint = {c: g.prior[c] * s.row(c).get(m, 0.0) for c in g.content_ids()}
        denom = sum(joint.values())
        if denom > 0.0:
            posterior[m] = {c: w / denom for c, w in joint.items() if w > 0.0}
            on_path.add(m)
        else:
            posterior[m] = _off_path_row(g, m, rule)
    return BeliefSystem(posterior, rule, frozenset(on_path))


def _sender_value(g: MeaningGame, cid: str, mid: str, receiver_row) -> float:
    return sum(
        p * _utility_unchecked(g, cid, mid, aid, "S")
        for aid, p in receiver_row.items()
        if p > 0.0
    )


def _receiver_value(g: MeaningGame, mid: str, aid: str, belief_row) -> float:
    return sum(
        p * _utility_unchecked(g, cid, mid, aid, "R")
        for cid, p in belief_row.items()
        if p > 0.0
    )


def is_equilibrium(
    g: MeaningGame,
    p: Profile,
    rule: OffPathRule = "prior",
    beliefs: BeliefSystem | None = None,
) -> EquilibriumCheck:
    """Mutual best response check with a profitable-deviation witness.

    The sender condition requires every message in the support of each
    content's row to maximize expected utility against the receiver among
    that content's grammatical messages.  The receiver condition requires
    every content in the support of each message's row to maximize
    belief-expected utility among the message's grammatical contents;
    beliefs default to the Bayes posterior with the given off-path rule.
    Comparisons tolerate ties within 1e-9.
    """
    _validate_sender(g, p.sender)
    _validate_receiver(g, p.receiver)
    if beliefs is None:
        beliefs = posterior_beliefs(g, p.sender, rule)

    for cid in g.content_ids():
        options = g.messages_for(cid)
        values = {m: _sender_value(g, cid, m, p.receiver.row(m)) for m in options}
        best_m = max(values, key=values.get)
        best = values[best_m]
        for mid, prob in p.sender.row(cid).items():
            if prob > 0.0 and values[mid] < best - TOL:
                return EquilibriumCheck(
                    False, Deviation("S", cid, mid, best_m, best - values[mid])
                )

    for mid in g.message_ids():
        options = g.contents_for(mid)
        if not options:
            continue
        belief_row = beliefs.at(mid)
        values = {a: _receiver_value(g, mid, a, belief_row) for a in options}
        best_a = max(values, key=values.get)
        best = values[best_a]
        for aid, prob in p.receiver.row(mid).items():
            if prob > 0.0 and values[aid] < best - TOL:
                return EquilibriumCheck(
                    False, Deviation("R", mid, aid, best_a, best - values[aid])
                )

    return EquilibriumCheck(True)


def classify_profile(g: MeaningGame, smap: Mapping[str, str]) -> str:
    """Separating, pooling, or partial, judged on the prior's support."""
    support = [c for c in g.content_ids() if g.prior[c] > 0.0]
    sent = [smap[c] for c in support]
    if len(set(sent)) == len(sent):
        return "separating"
    if len(set(sent)) == 1:
        return "pooling"
    return "partial"


def profile_count(g: MeaningGame) -> int:
    count = 1
    for c in g.content_ids():
        count *= len(g.messages_for(c))
    for m in g.message_ids():
        deg = len(g.contents_for(m))
        if deg:
            count *= deg
    return count


ProfileFilter = Callable[[Mapping[str, str]], bool]


def enumerate_pure_equilibria(
    g: MeaningGame,
    rule: OffPathRule = "prior",
    cap: int | None = None,
    belief_builder: BeliefBuilder | None = None,
    sender_filter: ProfileFilter | None = None,
    receiver_filter: ProfileFilter | None = None,
) -> list[EquilibriumReport]:
    """All deterministic profiles that are mutual best responses.

    Output order is lexicographic in the profile encoding: the tuple of
    chosen message indices per content (game order) followed by the chosen
    content indices per message.  The search is organized receiver-major:
    against a fixed pure receiver, the sender's best-reply set per content
    is computed once, and only senders drawn from those sets can pass, so
    the full profile product is never materialized.

    ``belief_builder`` optionally replaces the Bayes-plus-rule belief
    system; flattened compound games use this to keep off-path beliefs
    consistent with their constituents.  The filters restrict which
    deterministic assignment maps count as admissible strategies (compound
    games admit only combinations of per-constituent strategies).
    """
    cap = DEFAULT_CAP if cap is None else cap
    total = profile_count(g)
    if total > cap:
        raise SizeLimitError(
            f"{total} deterministic profiles exceed the cap of {cap}; "
            "flatten compound structure coarsely, prune the game by the "
            "observed message, or raise the cap"
        )

    cids = g.content_ids()
    mids = [m for m in g.message_ids() if g.contents_for(m)]
    c_index = {c: i for i, c in enumerate(g.content_ids())}
    m_index = {m: i for i, m in enumerate(g.message_ids())}

    found: list[tuple[tuple, EquilibriumReport]] = []
    receiver_choices = [g.contents_for(m) for m in mids]
    for r_combo in itertools.product(*receiver_choices):
        rmap = dict(zip(mids, r_combo))
        if receiver_filter is not None and not receiver_filter(rmap):
            continue
        receiver_rows = {m: {rmap[m]: 1.0} for m in mids}

        best_sets = []
        for c in cids:
            options = g.messages_for(c)
            values = {m: _utility_unchecked(g, c, m, rmap[m], "S") for m in options}
            best = max(values.values())
            best_sets.append([m for m in options if values[m] >= best - TOL])

        for s_combo in itertools.product(*best_sets):
            smap = dict(zip(cids, s_combo))
            if sender_filter is not None and not sender_filter(smap):
                continue
            sender = SenderStrategy.deterministic(smap)
            if belief_builder is not None:
                beliefs = belief_builder(sender)
            else:
                beliefs = posterior_beliefs(g, sender, rule)

            ok = True
            for m in mids:
                options = g.contents_for(m)
                belief_row = beliefs.at(m)
                values = {a: _receiver_value(g, m, a, belief_row) for a in options}
                if values[rmap[m]] < max(values.values()) - TOL:
                    ok = False
                    break
            if not ok:
                continue

            profile = Profile(sender, ReceiverStrategy(receiver_rows))
            report = EquilibriumReport(
                profile=profile,
                beliefs=beliefs,
                success=success_probability(g, profile.sender, profile.receiver),
                eu_sender=expected_utility(g, profile.sender, profile.receiver, "S"),
                eu_receiver=expected_utility(g, profile.sender, profile.receiver, "R"),
                kind=classify_profile(g, smap),
            )
            encoding = (
                tuple(m_index[smap[c]] for c in cids),
                tuple(c_index[rmap[m]] for m in mids),
            )
            found.append((encoding, report))

    found.sort(key=lambda item: item[0])
    return [report for _, report in found]


def _dominates(a: EquilibriumReport, b: EquilibriumReport) -> bool:
    """Pareto dominance: weakly better for both players, strictly for one."""
    weakly = a.eu_sender >= b.eu_sender - TOL and a.eu_receiver >= b.eu_receiver - TOL
    strictly = a.eu_sender > b.eu_sender + TOL or a.eu_receiver > b.eu_receiver + TOL
    return weakly and strictly


def pareto_filter(reports: list[EquilibriumReport]) -> list[EquilibriumReport]:
    """Keep only equilibria no other equilibrium is Pareto superior to."""
    return [
        r
        for r in reports
        if not any(_dominates(other, r) for other in reports if other is not r)
    ]


def _on_path_interpretation(
    g: MeaningGame, report: EquilibriumReport
) -> tuple[tuple[str, str], ...]:
    smap = report.sender_map()
    on_path = {
        smap[c] for c in g.content_ids() if g.prior[c] > 0.0
    }
    rmap = report.receiver_map()
    return tuple(sorted((m, rmap[m]) for m in on_path))


@dataclass(frozen=True)
class Prediction:
    """Pareto-optimal equilibria of a game, with ambiguity made explicit.

    ``ambiguous`` is set when the surviving equilibria disagree about how
    on-path messages are interpreted; payoff ties that agree on
    interpretation are not flagged.
    """

    reports: tuple[EquilibriumReport, ...]
    ambiguous: bool
    interpretations: tuple[tuple[tuple[str, str], ...], ...]

    def interpretation(self) -> dict[str, str]:
        if self.ambiguous:
            raise NotApplicableError("prediction is ambiguous")
        if not self.reports:
            raise NotApplicableError("no equilibrium found")
        return dict(self.interpretations[0])

    def readings_of(self, mid: str) -> set[str]:
        """All interpretations the surviving equilibria assign a message."""
        return {r.receiver_map()[mid] for r in self.reports if mid in r.receiver_map()}


def predict(
    g: MeaningGame,
    rule: OffPathRule = "prior",
    cap: int | None = None,
    belief_builder: BeliefBuilder | None = None,
    sender_filter: ProfileFilter | None = None,
    receiver_filter: ProfileFilter | None = None,
) -> Prediction:
    """Pareto filter over the enumerated equilibria; ties all returned."""
    reports = pareto_filter(
        enumerate_pure_equilibria(
            g, rule, cap, belief_builder, sender_filter, receiver_filter
        )
    )
    maps = []
    for r in reports:
        interp = _on_path_interpretation(g, r)
        if interp not in maps:
            maps.append(interp)
    return Prediction(tuple(reports), len(maps) > 1, tuple(maps))


def _per_message_cost(
    g: MeaningGame, costs: Mapping[tuple[str, str], float], sender_side: bool
) -> dict[str, float]:
    out = {}
    for m in g.message_ids():
        values = [
            costs[(c, m)] if sender_side else costs[(m, c)] for c in g.content_ids()
        ]
        if max(values) - min(values) > TOL:
            raise NotApplicableError(
                f"message {m!r} has content-dependent costs; no per-message cost"
            )
        out[m] = values[0]
    return out


def assortative_solution(g: MeaningGame) -> Profile:
    """Pair the i-th most probable content with the i-th lightest message.

    Requires a complete game with as many messages as contents, a strictly
    ordered prior, and strictly ordered per-message costs that both players
    rank the same way.  This is the closed form of the prediction that a
    more salient content is referred to by a lighter message.
    """
    if not g.is_complete():
        raise NotApplicableError("assortative solution needs a complete game")
    if len(g.contents) != len(g.messages):
        raise NotApplicableError("assortative solution needs |contents| == |messages|")

    sc = _per_message_cost(g, g.utility.sender_cost, sender_side=True)
    rc = _per_message_cost(g, g.utility.receiver_cost, sender_side=False)
    by_cost = sorted(g.message_ids(), key=lambda m: sc[m])
    for a, b in zip(by_cost, by_cost[1:]):
        if sc[b] - sc[a] <= TOL:
            raise NotApplicableError("per-message sender costs are not strictly ordered")
        if rc[b] - rc[a] <= TOL:
            raise NotApplicableError(
                "receiver costs do not rank messages the same strict way"
            )

    by_prior = sorted(g.content_ids(), key=lambda c: -g.prior[c])
    for a, b in zip(by_prior, by_prior[1:]):
        if g.prior[a] - g.prior[b] <= TOL:
            raise NotApplicableError("prior weights are not strictly ordered")

    smap = dict(zip(by_prior, by_cost))
    rmap = dict(zip(by_cost, by_prior))
    return Profile.from_maps(smap, rmap)


def explain_two_by_two(g: MeaningGame) -> dict[str, float | str]:
    """Numeric decomposition of the expected-utility gap for 2x2 games.

    For a complete two-content, two-message game with per-message costs,
    the two full-success separating profiles differ in expected utility by
    exactly (P1 - P2) * (U1 - U2), where P1 >= P2 are the prior weights and
    U1 >= U2 are the per-message utilities (negated costs).  Returns all
    the named quantities for reporting.
    """
    if len(g.contents) != 2 or len(g.messages) != 2 or not g.is_complete():
        raise NotApplicableError("expected-utility decomposition needs a complete 2x2 game")
    sc = _per_message_cost(g, g.utility.sender_cost, sender_side=True)
    rc = _per_message_cost(g, g.utility.receiver_cost, sender_side=False)
    eff = {m: (sc[m] + rc[m]) / 2.0 if g.utility.shared else sc[m] for m in sc}

    c1, c2 = sorted(g.content_ids(), key=lambda c: -g.prior[c])
    m1, m2 = sorted(g.message_ids(), key=lambda m: eff[m])
    p1, p2 = g.prior[c1], g.prior[c2]
    u1, u2 = -eff[m1], -eff[m2]
    return {
        "content_high": c1,
        "content_low": c2,
        "message_light": m1,
        "message_heavy": m2,
        "p1": p1,
        "p2": p2,
        "u1": u1,
        "u2": u2,
        "eu_matched": p1 * u1 + p2 * u2,
        "eu_crossed": p1 * u2 + p2 * u1,
        "gap": (p1 - p2) * (u1 - u2),
    }


def bonus_free(g: MeaningGame) -> MeaningGame:
    """The same game with success worth nothing; isolates message costs."""
    overlap = None
    if g.utility.bonus_overlap is not None:
        overlap = {pair: (0.0, 0.0) for pair in g.utility.bonus_overlap}
    return replace(
        g,
        utility=replace(
            g.utility, sender_bonus=0.0, receiver_bonus=0.0, bonus_overlap=overlap
        ),
    )

"""Compound meaning games: several games played in parallel.

A compound expression (a sentence with its noun phrases) is one turn of
several overlapping constituent games.  Players pick a combination of
strategies and maximize the expected utility of the whole compound, so the
compound is solved by flattening it into a single meaning game over joint
contents and joint messages and reusing the equilibrium machinery.

Flattening preserves utilities exactly: a joint turn earns each
constituent's success bonus independently (a turn can succeed in one slot
and fail in another), and costs add up weighted by constituent weight.
The flattened game records this through the utility model's bonus overlap
table.  Off-path beliefs are also kept consistent with the constituents:
a message unused in the joint play may still pin down some components via
Bayes on the induced marginal strategies, so the fallback factors through
components instead of dropping to the flat off-path rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .errors import InvalidGameError, NotApplicableError, SizeLimitError
from .equilibrium import (
    DEFAULT_CAP,
    BeliefSystem,
    OffPathRule,
    Prediction,
    Profile,
    ProfileFilter,
    _off_path_row,
    enumerate_pure_equilibria,
    predict,
)
from .game import (
    TOL,
    Content,
    MeaningGame,
    Message,
    Player,
    Prior,
    SenderStrategy,
    UtilityModel,
    _utility_unchecked,
)

JOINER = "|"


@dataclass(frozen=True)
class Slot:
    """A position in the compound expression (sentence frame, subject NP)."""

    id: str
    description: str = ""


@dataclass(frozen=True)
class ConstituentGame:
    slot: Slot
    game: MeaningGame
    weight: float = 1.0


@dataclass(frozen=True)
class CompatibilityRelation:
    """Joint message assignments (one message per slot) that are mutually
    realizable as a single compound expression."""

    feasible: frozenset[tuple[str, ...]]


@dataclass(frozen=True)
class CompoundGame:
    """Constituent games plus joint feasibility on messages and contents.

    ``compat`` restricted to None means every combination of constituent
    messages is realizable; ``joint_contents`` None likewise allows every
    combination of constituent contents.
    """

    constituents: tuple[ConstituentGame, ...]
    compat: CompatibilityRelation | None = None
    joint_contents: frozenset[tuple[str, ...]] | None = None


@dataclass(frozen=True)
class Flattened:
    """A flattened compound: the composite game plus provenance maps."""

    game: MeaningGame
    compound: CompoundGame
    content_components: Mapping[str, tuple[str, ...]]
    message_components: Mapping[str, tuple[str, ...]]


def _joint_tuples(cg: CompoundGame) -> tuple[list[tuple[str, ...]], list[tuple[str, ...]]]:
    n = len(cg.constituents)
    if cg.joint_contents is not None:
        contents = sorted(cg.joint_contents)
        if any(len(t) != n for t in contents):
            raise InvalidGameError("joint content tuples must cover every slot")
    else:
        contents = list(
            itertools.product(*[c.game.content_ids() for c in cg.constituents])
        )
    if cg.compat is not None:
        messages = sorted(cg.compat.feasible)
        if not messages:
            raise InvalidGameError("compatibility relation is empty")
        if any(len(t) != n for t in messages):
            raise InvalidGameError("joint message tuples must cover every slot")
    else:
        messages = list(
            itertools.product(*[c.game.message_ids() for c in cg.constituents])
        )
    return contents, messages


def flatten(cg: CompoundGame, cap: int | None = None) -> Flattened:
    """Build the single meaning game the compound amounts to.

    Joint contents and messages are the feasible assignment tuples; the
    prior is the product of constituent priors renormalized over feasible
    joint contents; utilities are weight-summed componentwise, with each
    constituent's success bonus recorded in the overlap table so partial
    success is scored exactly; edges require componentwise grammaticality.
    """
    cap = DEFAULT_CAP if cap is None else cap
    if not cg.constituents:
        raise InvalidGameError("compound game has no constituents")
    shared_flags = {c.game.utility.shared for c in cg.constituents}
    if len(shared_flags) > 1:
        raise NotApplicableError(
            "constituents must agree on the shared-utility flag to flatten exactly"
        )
    if any(c.weight <= 0 for c in cg.constituents):
        raise InvalidGameError("constituent weights must be positive")
    for c in cg.constituents:
        for cid in c.game.content_ids() + c.game.message_ids():
            if JOINER in cid:
                raise InvalidGameError(
                    f"component id {cid!r} may not contain {JOINER!r}"
                )

    joint_contents, joint_messages = _joint_tuples(cg)
    if len(joint_contents) * len(joint_messages) > cap:
        raise SizeLimitError(
            f"{len(joint_contents)} joint contents x {len(joint_messages)} joint "
            f"messages exceed the cap of {cap}"
        )

    games = [c.game for c in cg.constituents]
    weights = [c.weight for c in cg.constituents]
    n = len(games)

    labels_c = [{c.id: c.label for c in g.contents} for g in games]
    labels_m = [{m.id: m.label for m in g.messages} for g in games]

    raw_prior = {}
    contents = []
    content_components = {}
    for tup in joint_contents:
        cid = JOINER.join(tup)
        contents.append(
            Content(cid, " + ".join(labels_c[k][tup[k]] for k in range(n)))
        )
        content_components[cid] = tup
        w = 1.0
        for k in range(n):
            w *= games[k].prior[tup[k]]
        raw_prior[cid] = w
    total = sum(raw_prior.values())
    if total <= 0:
        raise InvalidGameError("every feasible joint content has zero prior mass")
    prior = Prior({cid: w / total for cid, w in raw_prior.items()})

    messages = []
    message_components = {}
    for tup in joint_messages:
        mid = JOINER.join(tup)
        messages.append(
            Message(mid, " + ".join(labels_m[k][tup[k]] for k in range(n)))
        )
        message_components[mid] = tup

    sender_cost = {}
    receiver_cost = {}
    for cid, ctup in content_components.items():
        for mid, mtup in message_components.items():
            if all((ctup[k], mtup[k]) in games[k].edges for k in range(n)):
                sender_cost[(cid, mid)] = sum(
                    weights[k] * games[k].utility.sender_cost[(ctup[k], mtup[k])]
                    for k in range(n)
                )
                receiver_cost[(mid, cid)] = sum(
                    weights[k] * games[k].utility.receiver_cost[(mtup[k], ctup[k])]
                    for k in range(n)
                )

    overlap = {}
    for cid, ctup in content_components.items():
        for aid, atup in content_components.items():
            overlap[(cid, aid)] = (
                sum(
                    weights[k] * games[k].utility.sender_bonus
                    for k in range(n)
                    if ctup[k] == atup[k]
                ),
                sum(
                    weights[k] * games[k].utility.receiver_bonus
                    for k in range(n)
                    if ctup[k] == atup[k]
                ),
            )

    utility = UtilityModel(
        sender_bonus=sum(w * g.utility.sender_bonus for w, g in zip(weights, games)),
        receiver_bonus=sum(w * g.utility.receiver_bonus for w, g in zip(weights, games)),
        sender_cost=sender_cost,
        receiver_cost=receiver_cost,
        shared=shared_flags.pop(),
        bonus_overlap=overlap,
    )
    flat_game = MeaningGame(tuple(contents), tuple(messages), prior, utility)
    for c in flat_game.contents:
        if not flat_game.messages_for(c.id):
            raise InvalidGameError(
                f"joint content {c.id!r} has no feasible grammatical message"
            )
    return Flattened(flat_game, cg, content_components, message_components)


def composite_belief_builder(flat: Flattened, rule: OffPathRule = "prior"):
    """Belief builder whose off-path fallback factors through components.

    On-path joint messages get the plain Bayes posterior.  An off-path
    joint message is judged component by component: components on the path
    of the induced marginal sender strategy keep their Bayes posterior,
    the rest fall back to the off-path rule within their constituent.  The
    product, restricted to feasible joint contents, is the joint belief.
    With unrelated constituents this makes the composite equilibria factor
    into the constituents' equilibria, which a flat fallback would break.
    """
    g = flat.game
    games = [c.game for c in flat.compound.constituents]
    n = len(games)

    def build(sender: SenderStrategy) -> BeliefSystem:
        posterior: dict[str, dict[str, float]] = {}
        on_path = set()

        marginal_p = [dict() for _ in range(n)]
        marginal_s = [dict() for _ in range(n)]
        for cid in g.content_ids():
            ctup = flat.content_components[cid]
            p = g.prior[cid]
            row = sender.row(cid)
            for k in range(n):
                marginal_p[k][ctup[k]] = marginal_p[k].get(ctup[k], 0.0) + p
                for mid, q in row.items():
                    if q <= 0.0:
                        continue
                    mk = flat.message_components[mid][k]
                    key = (ctup[k], mk)
                    marginal_s[k][key] = marginal_s[k].get(key, 0.0) + p * q

        for mid in g.message_ids():
            eligible = g.contents_for(mid)
            if not eligible:
                continue
            joint = {c: g.prior[c] * sender.row(c).get(mid, 0.0) for c in g.content_ids()}
            denom = sum(joint.values())
            if denom > 0.0:
                posterior[mid] = {c: w / denom for c, w in joint.items() if w > 0.0}
                on_path.add(mid)
                continue

            mtup = flat.message_components[mid]
            component_beliefs = []
            for k in range(n):
                mk = mtup[k]
                mass = {
                    ck: marginal_s[k].get((ck, mk), 0.0)
                    for ck in games[k].content_ids()
                }
                total = sum(mass.values())
                if total > 0.0:
                    component_beliefs.append(
                        {ck: w / total for ck, w in mass.items() if w > 0.0}
                    )
                else:
                    component_beliefs.append(_off_path_row(games[k], mk, rule))

            row = {}
            for cid in eligible:
                ctup = flat.content_components[cid]
                w = 1.0
                for k in range(n):
                    w *= component_beliefs[k].get(ctup[k], 0.0)
                if w > 0.0:
                    row[cid] = w
            total = sum(row.values())
            if total > 0.0:
                posterior[mid] = {c: w / total for c, w in row.items()}
            else:
                posterior[mid] = _off_path_row(g, mid, rule)
        return BeliefSystem(posterior, rule, frozenset(on_path))

    return build


def product_sender_filter(flat: Flattened) -> "ProfileFilter":
    """Admit only sender maps that are combinations of per-slot strategies.

    A player of a compound game picks one strategy per constituent, so the
    message component chosen for slot k may depend only on the content
    component of slot k.  Joint maps that cross-code one slot's content
    into another slot's message are not available strategies, even though
    they would be best replies in the flattened game.
    """
    n = len(flat.compound.constituents)

    def admit(smap) -> bool:
        for k in range(n):
            induced: dict[str, str] = {}
            for cid, mid in smap.items():
                ck = flat.content_components[cid][k]
                mk = flat.message_components[mid][k]
                if induced.setdefault(ck, mk) != mk:
                    return False
        return True

    return admit


def product_receiver_filter(flat: Flattened) -> "ProfileFilter":
    """Admit only receiver maps that factor through message components."""
    n = len(flat.compound.constituents)

    def admit(rmap) -> bool:
        for k in range(n):
            induced: dict[str, str] = {}
            for mid, cid in rmap.items():
                mk = flat.message_components[mid][k]
                ak = flat.content_components[cid][k]
                if induced.setdefault(mk, ak) != ak:
                    return False
        return True

    return admit


def enumerate_compound(
    flat: Flattened, rule: OffPathRule = "prior", cap: int | None = None
):
    """Pure equilibria of the flattened game over per-constituent strategy
    combinations, with component-consistent beliefs."""
    return enumerate_pure_equilibria(
        flat.game,
        rule,
        cap,
        belief_builder=composite_belief_builder(flat, rule),
        sender_filter=product_sender_filter(flat),
        receiver_filter=product_receiver_filter(flat),
    )


def constituent_expected_utility(
    flat: Flattened, k: int, profile: Profile, player: Player
) -> float:
    """Expected utility one constituent earns under joint play.

    Marginalizes the joint outcome distribution onto constituent ``k`` and
    evaluates that constituent's own utility, unweighted.
    """
    g = flat.game
    sub = flat.compound.constituents[k].game
    total = 0.0
    for cid in g.content_ids():
        p_c = g.prior[cid]
        if p_c == 0.0:
            continue
        ck = flat.content_components[cid][k]
        for mid, p_m in profile.sender.row(cid).items():
            if p_m == 0.0:
                continue
            mk = flat.message_components[mid][k]
            for aid, p_a in profile.receiver.row(mid).items():
                if p_a == 0.0:
                    continue
                ak = flat.content_components[aid][k]
                total += p_c * p_m * p_a * _utility_unchecked(sub, ck, mk, ak, player)
    return total


@dataclass(frozen=True)
class ConstituentAnnotation:
    """Whether the global solution is also optimal for one constituent."""

    slot_id: str
    locally_optimal: bool
    induced_eu_sender: float
    induced_eu_receiver: float
    best_eu_sender: float
    best_eu_receiver: float


@dataclass(frozen=True)
class CompoundPrediction:
    flattened: Flattened
    prediction: Prediction
    annotations: tuple[tuple[ConstituentAnnotation, ...], ...]

    def slot_readings(self, report_index: int = 0) -> dict[str, dict[str, str]]:
        """Per-slot message-to-content readings of one surviving report."""
        report = self.prediction.reports[report_index]
        out: dict[str, dict[str, str]] = {
            c.slot.id: {} for c in self.flattened.compound.constituents
        }
        for mid, cid in report.receiver_map().items():
            mtup = self.flattened.message_components[mid]
            ctup = self.flattened.content_components[cid]
            for k, c in enumerate(self.flattened.compound.constituents):
                out[c.slot.id][mtup[k]] = ctup[k]
        return out


def predict_compound(
    cg: CompoundGame,
    rule: OffPathRule = "prior",
    cap: int | None = None,
) -> CompoundPrediction:
    """Flatten, predict globally, and annotate per-constituent optimality.

    A constituent is marked locally optimal when the expected utility it
    earns under the global solution is not beaten (for either player,
    beyond tolerance) by one of its own predicted equilibria.  A global
    solution routinely sacrifices a constituent: that is the point of
    playing the compound as a whole.
    """
    flat = flatten(cg, cap)
    prediction = predict(
        flat.game,
        rule,
        cap,
        belief_builder=composite_belief_builder(flat, rule),
        sender_filter=product_sender_filter(flat),
        receiver_filter=product_receiver_filter(flat),
    )

    own = [predict(c.game, rule, cap) for c in cg.constituents]
    all_annotations = []
    for report in prediction.reports:
        annotations = []
        for k, constituent in enumerate(cg.constituents):
            ind_s = constituent_expected_utility(flat, k, report.profile, "S")
            ind_r = constituent_expected_utility(flat, k, report.profile, "R")
            own_reports = own[k].reports
            if own_reports:
                optimal = any(
                    ind_s >= r.eu_sender - TOL and ind_r >= r.eu_receiver - TOL
                    for r in own_reports
                )
                best_s = max(r.eu_sender for r in own_reports)
                best_r = max(r.eu_receiver for r in own_reports)
            else:
                optimal, best_s, best_r = True, ind_s, ind_r
            annotations.append(
                ConstituentAnnotation(
                    constituent.slot.id, optimal, ind_s, ind_r, best_s, best_r
                )
            )
        all_annotations.append(tuple(annotations))
    return CompoundPrediction(flat, prediction, tuple(all_annotations))

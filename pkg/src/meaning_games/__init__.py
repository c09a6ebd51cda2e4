"""Meaning games: signaling games of intended communication.

The package models a turn of communication as a discrete signaling game
whose types and actions are both semantic contents, enumerates and selects
its equilibria, and applies the machinery to reference resolution in
discourse: salience builds the prior, expression lightness the costs, and
the Pareto-optimal equilibrium is the predicted interpretation.
"""

from .beliefs import (
    BeliefNode,
    LevelKConfig,
    LevelKResult,
    consistency_check,
    level_k_strategies,
    prune_by_message,
)
from .centering import (
    CompoundSection,
    Discourse,
    DiscourseState,
    Entity,
    ExpressionForm,
    ExpressionOption,
    FormKind,
    GrammaticalFunction,
    PropositionOption,
    Realization,
    ReferenceSlot,
    ResolutionConfig,
    ResolveReport,
    Rule1Violation,
    SentenceOption,
    SlotResolution,
    Utterance,
    accommodate,
    build_compound,
    build_np_game,
    build_sentence_game,
    cb,
    cf,
    cp,
    ingest,
    resolve,
    rule1_check,
    salience_priors,
)
from .compound import (
    CompatibilityRelation,
    CompoundGame,
    CompoundPrediction,
    ConstituentAnnotation,
    ConstituentGame,
    Flattened,
    Slot,
    composite_belief_builder,
    constituent_expected_utility,
    enumerate_compound,
    flatten,
    predict_compound,
)
from .equilibrium import (
    BeliefSystem,
    Deviation,
    EquilibriumCheck,
    EquilibriumReport,
    Prediction,
    Profile,
    assortative_solution,
    enumerate_pure_equilibria,
    explain_two_by_two,
    is_equilibrium,
    pareto_filter,
    posterior_beliefs,
    predict,
)
from .errors import (
    InvalidGameError,
    MeaningGameError,
    NotApplicableError,
    ScenarioError,
    SizeLimitError,
)
from .game import (
    Content,
    MeaningGame,
    Message,
    Prior,
    ReceiverStrategy,
    SenderStrategy,
    Turn,
    UtilityModel,
    ValidationReport,
    equalize_utilities,
    expected_utility,
    is_cheap_talk,
    success_probability,
    utility,
    validate_game,
)
from .scenario_io import (
    GameSpec,
    RunReport,
    load_discourse,
    load_game,
    parse_discourse,
    parse_game,
    serialize_game,
)

__version__ = "0.1.0"

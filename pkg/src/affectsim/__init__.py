"""affectsim: emotion-aware user simulation for task-oriented dialogue.

A trigger-driven affect pipeline layered on an agenda-based task-completion
user simulator, a from-scratch deep-Q dialogue policy, an experiment
harness with multi-seed learning curves and figure export, and a
human-in-the-loop service for profile calibration.
"""

from .domain import DialogueAct, DomainSchema, KnowledgeBase, UserGoal, kb_lookup, load_domain, sample_goal
from .emotion import (
    EMOTIONS,
    TRIGGERS,
    EmotionProfile,
    EmotionState,
    EmotionVariation,
    Personality,
    TriggerVector,
    decay_term,
    default_profile,
    negative_mass,
    normalized,
    should_terminate,
    update_state,
    variation,
    variation_simple,
)
from .simulator import UserSimulator, UserSimState, dialogue_success
from .triggers import TurnContext, detect_all

__version__ = "0.1.0"

__all__ = [
    "DialogueAct", "DomainSchema", "KnowledgeBase", "UserGoal", "kb_lookup",
    "load_domain", "sample_goal",
    "EMOTIONS", "TRIGGERS", "EmotionProfile", "EmotionState", "EmotionVariation",
    "Personality", "TriggerVector", "decay_term", "default_profile",
    "negative_mass", "normalized", "should_terminate", "update_state",
    "variation", "variation_simple",
    "UserSimulator", "UserSimState", "dialogue_success",
    "TurnContext", "detect_all",
    "__version__",
]

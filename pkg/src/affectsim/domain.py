"""Domain schemas, user goals, dialogue acts, and the synthetic knowledge base.

Two built-in domains ship as checked-in JSON assets (movie-ticket booking
and taxi ordering): a schema listing intents and slots, a seeded synthetic
knowledge base of entity records, and a library of goal templates encoding
realistic inform/request splits.  Everything operates at the dialogue-act
level; slot values are opaque strings compared only for equality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

_DATA_DIR = Path(__file__).parent / "data"

# Intents shared by every domain (Table-style schema) plus the extended
# "terminating" intent representing early suspension by the user.
SHARED_INTENTS = frozenset({
    "request", "inform", "deny", "greeting", "confirm_question",
    "confirm_answer", "multiple_choice", "thanks", "closing", "terminating",
})

SHARED_SLOTS = frozenset({
    "date", "city", "zip", "state", "distance_constraints",
    "number_of_people", "task_complete", "other",
})

# Special value a user supplies for a requested slot it has no constraint on.
ANY_VALUE = "any"


@dataclass(frozen=True)
class DomainSchema:
    """Intent and slot inventory for one task domain."""

    name: str
    intents: frozenset
    shared_slots: frozenset
    domain_slots: frozenset
    kb_slots: tuple  # ordered informable slots every KB record assigns

    def __post_init__(self):
        missing = SHARED_INTENTS - self.intents
        if missing:
            raise ValueError(f"schema {self.name!r} lacks required intents: {sorted(missing)}")
        if set(self.kb_slots) - self.slots:
            raise ValueError("kb_slots must be a subset of the schema slots")

    @property
    def slots(self) -> frozenset:
        return self.shared_slots | self.domain_slots

    @classmethod
    def from_dict(cls, data: dict) -> "DomainSchema":
        return cls(
            name=data["name"],
            intents=frozenset(data["intents"]),
            shared_slots=frozenset(data["shared_slots"]),
            domain_slots=frozenset(data["domain_slots"]),
            kb_slots=tuple(data["kb_slots"]),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "intents": sorted(self.intents),
            "shared_slots": sorted(self.shared_slots),
            "domain_slots": sorted(self.domain_slots),
            "kb_slots": list(self.kb_slots),
        }


@dataclass(frozen=True)
class UserGoal:
    """Constraints the user holds plus the slots it wants to learn."""

    inform_slots: dict
    request_slots: frozenset

    def __post_init__(self):
        object.__setattr__(self, "request_slots", frozenset(self.request_slots))
        if not self.request_slots:
            raise ValueError("a goal must request at least one slot")
        overlap = set(self.inform_slots) & self.request_slots
        if overlap:
            raise ValueError(f"inform and request slots overlap: {sorted(overlap)}")

    def validate(self, schema: DomainSchema) -> None:
        unknown = (set(self.inform_slots) | self.request_slots) - schema.slots
        if unknown:
            raise ValueError(f"goal uses slots outside schema {schema.name!r}: {sorted(unknown)}")

    def to_dict(self) -> dict:
        return {
            "inform_slots": dict(self.inform_slots),
            "request_slots": sorted(self.request_slots),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "UserGoal":
        return cls(dict(data["inform_slots"]), frozenset(data["request_slots"]))


@dataclass(frozen=True)
class DialogueAct:
    """One semantic-level message: an intent plus inform/request slots."""

    intent: str
    inform_slots: dict = field(default_factory=dict)
    request_slots: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "inform_slots", dict(self.inform_slots))
        object.__setattr__(self, "request_slots", frozenset(self.request_slots))
        if self.intent == "terminating" and (self.inform_slots or self.request_slots):
            raise ValueError("a terminating act carries no slots")

    def mentioned_slots(self) -> frozenset:
        return frozenset(self.inform_slots) | self.request_slots

    def validate(self, schema: DomainSchema) -> None:
        if self.intent not in schema.intents:
            raise ValueError(f"intent {self.intent!r} not in schema {schema.name!r}")
        unknown = self.mentioned_slots() - schema.slots
        if unknown:
            raise ValueError(f"act uses slots outside schema {schema.name!r}: {sorted(unknown)}")

    def to_dict(self) -> dict:
        return {
            "intent": self.intent,
            "inform_slots": dict(self.inform_slots),
            "request_slots": sorted(self.request_slots),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DialogueAct":
        return cls(
            intent=data["intent"],
            inform_slots=dict(data.get("inform_slots", {})),
            request_slots=frozenset(data.get("request_slots", ())),
        )


class KnowledgeBase:
    """Flat list of schema-complete records with exact-match lookup."""

    def __init__(self, schema: DomainSchema, records: list):
        for i, record in enumerate(records):
            missing = set(schema.kb_slots) - set(record)
            if missing:
                raise ValueError(f"kb record {i} missing slots: {sorted(missing)}")
        self.schema = schema
        self.records = [dict(r) for r in records]

    def __len__(self) -> int:
        return len(self.records)


def kb_lookup(kb: KnowledgeBase, constraints: dict) -> list:
    """Records matching every constraint exactly; empty means unsatisfiable."""
    unknown = set(constraints) - set(kb.schema.kb_slots)
    if unknown:
        raise ValueError(f"constraints use non-KB slots: {sorted(unknown)}")
    return [r for r in kb.records if all(r[s] == v for s, v in constraints.items())]


@dataclass(frozen=True)
class GoalTemplate:
    inform_slots: tuple
    request_slots: tuple


@dataclass
class Domain:
    """Schema, knowledge base and goal templates for one loaded domain."""

    schema: DomainSchema
    kb: KnowledgeBase
    goal_templates: list

    @property
    def name(self) -> str:
        return self.schema.name


def load_domain(name: str, root=None) -> Domain:
    """Load checked-in domain assets (schema.json, kb.json, goal_templates.json)."""
    base = Path(root) if root is not None else _DATA_DIR / name
    for part in ("schema", "kb", "goal_templates"):
        if not (base / f"{part}.json").exists():
            raise FileNotFoundError(f"domain asset missing: {base / (part + '.json')}")
    schema = DomainSchema.from_dict(json.loads((base / "schema.json").read_text()))
    kb = KnowledgeBase(schema, json.loads((base / "kb.json").read_text()))
    templates = [
        GoalTemplate(tuple(t["inform_slots"]), tuple(t["request_slots"]))
        for t in json.loads((base / "goal_templates.json").read_text())
    ]
    return Domain(schema=schema, kb=kb, goal_templates=templates)


def sample_goal(domain: Domain, rng, unsat_prob: float = 0.1) -> UserGoal:
    """Sample a template-shaped goal grounded in a knowledge-base record.

    Constraint values are copied from a randomly drawn record, which makes
    the goal satisfiable by construction.  With probability ``unsat_prob``
    the constraint combination is rerolled until it matches no record, to
    exercise failure dialogues.
    """
    template = domain.goal_templates[rng.randrange(len(domain.goal_templates))]
    record = domain.kb.records[rng.randrange(len(domain.kb.records))]
    constraints = {slot: record[slot] for slot in template.inform_slots}

    if unsat_prob > 0 and rng.random() < unsat_prob:
        constraints = _unsatisfiable_variant(domain, template, rng)

    goal = UserGoal(inform_slots=constraints, request_slots=frozenset(template.request_slots))
    goal.validate(domain.schema)
    return goal


def _unsatisfiable_variant(domain: Domain, template: GoalTemplate, rng, max_tries: int = 64) -> dict:
    vocab = {slot: sorted({r[slot] for r in domain.kb.records}) for slot in template.inform_slots}
    for _ in range(max_tries):
        constraints = {slot: vocab[slot][rng.randrange(len(vocab[slot]))] for slot in template.inform_slots}
        if not kb_lookup(domain.kb, constraints):
            return constraints
    # Dense KB corner: force a miss with an out-of-vocabulary value.
    slot = template.inform_slots[0]
    return {**constraints, slot: f"unlisted_{slot}"}

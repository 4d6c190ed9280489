"""Deterministic generation of the checked-in domain and profile assets.

The original conversational datasets behind the movie and taxi tasks are
not distributable, so the workbench ships synthetic stand-ins: a seeded
knowledge base of ~200 records per domain built from small per-slot
vocabularies, a library of goal templates, hand-authored emotion profiles,
and two named personality presets.  ``write_domain_assets`` regenerates
the JSON files byte-identically for a fixed seed.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

KB_SIZE = 200

_MOVIE_VOCAB = {
    "moviename": [
        "zootopia", "deadpool", "the witch", "risen", "race", "creed",
        "london has fallen", "whiskey tango foxtrot", "eddie the eagle",
        "triple 9", "gods of egypt", "the revenant", "star wars", "spotlight",
    ],
    "date": [
        "tonight", "tomorrow", "friday", "saturday", "sunday", "monday",
        "march 5th", "march 12th", "april 1st", "next week",
    ],
    "city": [
        "seattle", "portland", "chicago", "boston", "atlanta", "denver",
        "austin", "san francisco", "los angeles", "miami",
    ],
    "state": ["wa", "or", "il", "ma", "ga", "co", "tx", "ca"],
    "starttime": [
        "10:00am", "11:30am", "1:00pm", "2:45pm", "4:30pm", "6:00pm",
        "7:15pm", "8:00pm", "9:30pm", "10:45pm",
    ],
    "theater": [
        "regal meridian 16", "amc pacific place", "cinemark lincoln square",
        "amc southcenter", "regal thornton place", "varsity theatre",
        "amc river east", "century centre cinema", "amc boston common",
        "regal fenway",
    ],
    "theaterchain": [
        "amc", "regal", "cinemark", "century", "alamo drafthouse",
        "landmark", "showcase", "harkins",
    ],
    "price": ["$8", "$8.50", "$9", "$9.50", "$10", "$10.50", "$11", "$12", "$13.50", "$15"],
    "video_format": ["2d", "3d", "imax", "imax 3d", "4dx", "dolby", "standard", "xd"],
    "number_of_people": ["1", "2", "3", "4", "5", "6", "7", "8"],
    "ticket": [f"ticket-{i:04d}" for i in range(1, 21)],
}

# Slots whose values identify a showing; per-showing variants differ only
# in the remaining slots, so typical goals match a handful of records.
_MOVIE_BASE_SLOTS = (
    "moviename", "date", "city", "state", "theaterchain",
    "video_format", "number_of_people",
)
_MOVIE_VARIANT_SLOTS = ("starttime", "theater", "price", "ticket")

_MOVIE_TEMPLATES = [
    {"inform_slots": ["moviename", "date", "city"], "request_slots": ["ticket", "theater", "starttime"]},
    {"inform_slots": ["moviename", "city"], "request_slots": ["ticket", "starttime", "theater"]},
    {"inform_slots": ["moviename", "date", "city", "theaterchain"], "request_slots": ["ticket", "starttime"]},
    {"inform_slots": ["date", "city", "theaterchain"], "request_slots": ["ticket", "moviename", "starttime"]},
    {"inform_slots": ["moviename", "date", "city", "video_format"], "request_slots": ["ticket", "theater", "price"]},
    {"inform_slots": ["moviename", "city", "state"], "request_slots": ["ticket", "theater"]},
    {"inform_slots": ["moviename", "date", "city", "number_of_people"], "request_slots": ["ticket", "price"]},
    {"inform_slots": ["city", "date"], "request_slots": ["ticket", "moviename", "theater"]},
    {"inform_slots": ["moviename", "date"], "request_slots": ["ticket", "starttime", "price"]},
    {"inform_slots": ["moviename", "date", "city", "state"], "request_slots": ["ticket", "theater", "starttime"]},
]

_TAXI_VOCAB = {
    "pickup_location": [
        "airport terminal 2", "union station", "pike place market", "city hall",
        "convention center", "grand hotel", "central library", "north campus",
        "harbor pier 5", "museum of art", "stadium gate c", "elm street 120",
        "westfield mall", "memorial hospital",
    ],
    "dropoff_location": [
        "airport terminal 1", "king street station", "downtown plaza", "opera house",
        "tech park building 4", "riverside apartments", "lakeview hotel",
        "south campus", "ferry dock 3", "science center", "arena north entrance",
        "oak avenue 77", "eastgate mall", "st mary clinic",
    ],
    "pickup_city": [
        "seattle", "bellevue", "tacoma", "portland", "chicago", "evanston",
        "boston", "cambridge", "austin", "denver",
    ],
    "dropoff_city": [
        "seattle", "bellevue", "tacoma", "portland", "chicago", "evanston",
        "boston", "cambridge", "austin", "denver",
    ],
    "pickup_time": [
        "7:00am", "8:15am", "9:30am", "11:00am", "12:30pm", "2:00pm",
        "4:45pm", "6:30pm", "9:00pm", "11:15pm",
    ],
    "date": [
        "today", "tonight", "tomorrow", "friday", "saturday", "sunday",
        "monday", "march 5th", "march 12th", "next week",
    ],
    "taxi_company": [
        "yellow cab", "city taxi", "orange cab", "metro rides",
        "northwest taxi", "star cab", "rapid taxi", "harbor cab",
    ],
    "car_type": ["sedan", "suv", "van", "compact", "luxury", "hybrid", "wagon", "minibus"],
    "cost": ["$12", "$15", "$18", "$22", "$25", "$30", "$34", "$40", "$48", "$55"],
    "name": [
        "alex", "jordan", "sam", "casey", "riley", "morgan",
        "taylor", "avery", "quinn", "rowan", "jesse", "drew",
    ],
    "taxi": [f"booking-{i:04d}" for i in range(1, 21)],
}

_TAXI_BASE_SLOTS = (
    "pickup_location", "dropoff_location", "pickup_city", "dropoff_city", "date",
)
_TAXI_VARIANT_SLOTS = ("pickup_time", "taxi_company", "car_type", "cost", "name", "taxi")

_TAXI_TEMPLATES = [
    {"inform_slots": ["pickup_location", "dropoff_location", "pickup_city"], "request_slots": ["taxi", "cost"]},
    {"inform_slots": ["pickup_location", "dropoff_location", "pickup_time"], "request_slots": ["taxi", "cost", "car_type"]},
    {"inform_slots": ["pickup_location", "dropoff_location", "pickup_city", "date"], "request_slots": ["taxi", "cost"]},
    {"inform_slots": ["pickup_location", "dropoff_location"], "request_slots": ["taxi", "cost", "taxi_company"]},
    {"inform_slots": ["pickup_location", "dropoff_location", "car_type"], "request_slots": ["taxi", "cost", "pickup_time"]},
    {"inform_slots": ["pickup_city", "dropoff_city", "pickup_time"], "request_slots": ["taxi", "cost", "name"]},
    {"inform_slots": ["pickup_location", "dropoff_location", "pickup_time", "date"], "request_slots": ["taxi"]},
    {"inform_slots": ["pickup_location", "dropoff_city"], "request_slots": ["taxi", "cost", "pickup_time"]},
    {"inform_slots": ["pickup_location", "dropoff_location", "taxi_company"], "request_slots": ["taxi", "cost", "name"]},
    {"inform_slots": ["pickup_location", "dropoff_location", "pickup_city", "dropoff_city"], "request_slots": ["taxi", "cost"]},
]

_SCHEMAS = {
    "movie": {
        "name": "movie",
        "intents": [
            "request", "inform", "deny", "greeting", "confirm_question",
            "confirm_answer", "multiple_choice", "thanks", "closing",
            "terminating", "taskcomplete",
        ],
        "shared_slots": [
            "date", "city", "zip", "state", "distance_constraints",
            "number_of_people", "task_complete", "other",
        ],
        "domain_slots": [
            "moviename", "price", "starttime", "theater", "ticket",
            "theaterchain", "video_format",
        ],
        "kb_slots": list(_MOVIE_BASE_SLOTS) + list(_MOVIE_VARIANT_SLOTS),
    },
    "taxi": {
        "name": "taxi",
        "intents": [
            "request", "inform", "deny", "greeting", "confirm_question",
            "confirm_answer", "multiple_choice", "thanks", "closing",
            "terminating", "taskcomplete",
        ],
        "shared_slots": [
            "date", "city", "zip", "state", "distance_constraints",
            "number_of_people", "task_complete", "other",
        ],
        "domain_slots": [
            "taxi", "dropoff_location", "cost", "pickup_location",
            "taxi_company", "pickup_city", "pickup_time", "dropoff_city",
            "car_type", "name",
        ],
        "kb_slots": list(_TAXI_BASE_SLOTS) + list(_TAXI_VARIANT_SLOTS),
    },
}

_DOMAIN_PARTS = {
    "movie": (_MOVIE_VOCAB, _MOVIE_BASE_SLOTS, _MOVIE_VARIANT_SLOTS, _MOVIE_TEMPLATES),
    "taxi": (_TAXI_VOCAB, _TAXI_BASE_SLOTS, _TAXI_VARIANT_SLOTS, _TAXI_TEMPLATES),
}

# Emotion order: angry, disgust, fear, happy, sad, surprise.
# Trigger order: od, ir, rr, rq, in.
_PROFILES = {
    "movie": {
        "m_te": [
            [0.18, 0.12, 0.00, -0.10, 0.05, 0.05],
            [0.25, 0.20, 0.00, -0.15, 0.00, 0.10],
            [-0.15, -0.10, 0.00, 0.25, 0.00, 0.05],
            [0.20, 0.25, 0.00, -0.12, 0.00, 0.05],
            [-0.12, -0.08, 0.00, 0.30, 0.00, 0.12],
        ],
        "m_pt": [
            [0.15, 0.20, 0.25, 0.15, 0.45],
            [0.45, 0.30, 0.25, 0.40, 0.15],
            [0.15, 0.15, 0.30, 0.15, 0.30],
            [0.10, 0.15, 0.40, 0.10, 0.35],
            [0.50, 0.55, 0.10, 0.55, 0.10],
        ],
        "m_pe": [
            [0.15, 0.15, 0.20, 0.30, 0.15, 0.55],
            [0.25, 0.30, 0.20, 0.25, 0.20, 0.10],
            [0.20, 0.15, 0.10, 0.50, 0.10, 0.30],
            [0.10, 0.15, 0.15, 0.45, 0.20, 0.15],
            [0.60, 0.55, 0.50, 0.10, 0.55, 0.25],
        ],
        "decay_c": [0.08, 0.08, 0.10, 0.06, 0.08, 0.20],
        "eta_b": 0.5,
        "p_term": 0.03,
        "tau": 20,
    },
    "taxi": {
        "m_te": [
            [0.20, 0.14, 0.00, -0.10, 0.05, 0.05],
            [0.24, 0.18, 0.00, -0.14, 0.00, 0.08],
            [-0.14, -0.10, 0.00, 0.24, 0.00, 0.05],
            [0.22, 0.24, 0.00, -0.12, 0.00, 0.06],
            [-0.10, -0.08, 0.00, 0.28, 0.00, 0.14],
        ],
        "m_pt": [
            [0.15, 0.20, 0.25, 0.15, 0.45],
            [0.45, 0.30, 0.25, 0.40, 0.15],
            [0.15, 0.15, 0.30, 0.15, 0.30],
            [0.10, 0.15, 0.40, 0.10, 0.35],
            [0.50, 0.55, 0.10, 0.55, 0.10],
        ],
        "m_pe": [
            [0.15, 0.15, 0.20, 0.30, 0.15, 0.55],
            [0.25, 0.30, 0.20, 0.25, 0.20, 0.10],
            [0.20, 0.15, 0.10, 0.50, 0.10, 0.30],
            [0.10, 0.15, 0.15, 0.45, 0.20, 0.15],
            [0.60, 0.55, 0.50, 0.10, 0.55, 0.25],
        ],
        "decay_c": [0.06, 0.08, 0.10, 0.06, 0.08, 0.18],
        "eta_b": 0.5,
        "p_term": 0.03,
        "tau": 26,
    },
}

# Two preset users taken from Big Five questionnaire results: uA agreeable
# and even-keeled, uB withdrawn and high-neuroticism.
_PERSONALITIES = {
    "uA": {"open": 0.45, "cons": 0.62, "extra": 0.55, "agree": 0.70, "neuro": 0.30},
    "uB": {"open": 0.60, "cons": 0.40, "extra": 0.38, "agree": 0.32, "neuro": 0.78},
}


def generate_kb(domain: str, seed: int = 7, size: int = KB_SIZE) -> list:
    """Clustered synthetic records: showings/rides with 2-3 variants each."""
    vocab, base_slots, variant_slots, _ = _DOMAIN_PARTS[domain]
    rng = random.Random(seed)
    records, seen_bases = [], set()
    while len(records) < size:
        base = tuple(vocab[s][rng.randrange(len(vocab[s]))] for s in base_slots)
        if base in seen_bases:
            continue
        seen_bases.add(base)
        for _ in range(rng.randint(2, 3)):
            record = dict(zip(base_slots, base))
            for s in variant_slots:
                record[s] = vocab[s][rng.randrange(len(vocab[s]))]
            records.append(record)
            if len(records) == size:
                break
    return records


def write_domain_assets(out_dir, seed: int = 7) -> list:
    """Write schema/kb/goal_templates for both domains plus profiles; returns paths."""
    out_dir = Path(out_dir)
    written = []
    for domain in sorted(_DOMAIN_PARTS):
        base = out_dir / domain
        base.mkdir(parents=True, exist_ok=True)
        files = {
            "schema.json": _SCHEMAS[domain],
            "kb.json": generate_kb(domain, seed=seed),
            "goal_templates.json": _DOMAIN_PARTS[domain][3],
        }
        for fname, payload in files.items():
            path = base / fname
            path.write_text(json.dumps(payload, indent=2) + "\n")
            written.append(path)
    profile_dir = out_dir / "profiles"
    profile_dir.mkdir(parents=True, exist_ok=True)
    for domain, profile in sorted(_PROFILES.items()):
        path = profile_dir / f"{domain}.json"
        path.write_text(json.dumps(profile, indent=2) + "\n")
        written.append(path)
    personality_path = out_dir / "personalities.json"
    personality_path.write_text(json.dumps(_PERSONALITIES, indent=2) + "\n")
    written.append(personality_path)
    return written

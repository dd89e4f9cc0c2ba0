"""Regenerate the bundled synthetic dataset in src/arplan/data/.

36 features with three-point effort estimates, 24 stakeholders with
Likert weights, continuous Kano answers (raw mode) and the equivalent
category fractions, plus a scenario file with three capacity levels.

    python scripts/make_sample_data.py
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from arplan.ingest import (
    FeatureRecord,
    KanoResponseRecord,
    StakeholderRecord,
    format_features,
    format_kano_responses,
    format_stakeholders,
)
from arplan.kano import classify_raw_response

OUT = Path(__file__).resolve().parents[1] / "src" / "arplan" / "data"
SEED = 20180901
N_FEATURES = 36
N_STAKEHOLDERS = 24

# answer order: like, must-be, neutral, live-with, dislike
PROFILES = {
    "A": ([0.70, 0.05, 0.15, 0.05, 0.05], [0.05, 0.10, 0.55, 0.25, 0.05]),
    "O": ([0.75, 0.10, 0.05, 0.05, 0.05], [0.05, 0.05, 0.10, 0.10, 0.70]),
    "M": ([0.15, 0.45, 0.30, 0.05, 0.05], [0.05, 0.05, 0.10, 0.10, 0.70]),
    "I": ([0.10, 0.10, 0.60, 0.15, 0.05], [0.05, 0.10, 0.60, 0.20, 0.05]),
}

NAMES = [
    "Offline downloads", "Parental controls", "4K streaming", "Multi-profile accounts",
    "Continue watching", "Live sports", "Personalized recommendations", "Subtitles editor",
    "Chromecast support", "Watch party", "Ad-free tier", "Voice search",
    "Picture-in-picture", "Download over Wi-Fi only", "Episode auto-play", "Skip intro",
    "Trailer previews", "Dark mode", "Data saver", "Social sharing",
    "Watchlist sync", "Audio descriptions", "Multi-language audio", "Kids mode",
    "Smart TV app", "Rating and reviews", "Push notifications", "Live channel guide",
    "Cloud DVR", "Gift subscriptions", "Family billing", "Content calendar",
    "Behind-the-scenes extras", "Playback speed control", "Sleep timer", "Accessibility zoom",
]


def _distribution(rng: np.random.Generator, base: list[float]) -> tuple[float, ...]:
    noisy = 0.7 * np.asarray(base) + 0.3 * rng.dirichlet(np.ones(5))
    counts = rng.multinomial(20, noisy / noisy.sum())
    return tuple(float(c) / 20 for c in counts)


def main() -> None:
    rng = np.random.default_rng(SEED)
    OUT.mkdir(parents=True, exist_ok=True)

    features = []
    for j in range(N_FEATURES):
        ml = round(float(rng.uniform(15, 75)), 1)
        opt = round(ml * float(rng.uniform(0.5, 0.9)), 1)
        pess = round(ml * float(rng.uniform(1.2, 2.0)), 1)
        features.append(FeatureRecord(f"F{j + 1}", NAMES[j], opt, ml, pess))

    stakeholders = [StakeholderRecord(f"S{i + 1}", int(rng.integers(1, 10))) for i in range(N_STAKEHOLDERS)]

    kinds = rng.choice(list(PROFILES), size=N_FEATURES, p=[0.3, 0.25, 0.25, 0.2])
    raw, fractions = [], []
    for s in stakeholders:
        for f, kind in zip(features, kinds):
            func, dysf = PROFILES[kind]
            fd, dd = _distribution(rng, func), _distribution(rng, dysf)
            raw.append(KanoResponseRecord(s.id, f.id, functional=fd, dysfunctional=dd))
            fractions.append(KanoResponseRecord(s.id, f.id, fractions=classify_raw_response(fd, dd)))

    (OUT / "features.csv").write_text(format_features(features))
    (OUT / "stakeholders.csv").write_text(format_stakeholders(stakeholders))
    (OUT / "kano_raw.csv").write_text(format_kano_responses(raw))
    (OUT / "kano_fractions.csv").write_text(format_kano_responses(fractions))
    scenario = {
        "k": 2,
        "scenarios": [[112.7, 112.7], [367.4, 367.4], [625.5, 625.5]],
        "lambda_steps": 101,
        "seed": 0,
    }
    (OUT / "scenario.json").write_text(json.dumps(scenario, indent=2) + "\n")


if __name__ == "__main__":
    main()

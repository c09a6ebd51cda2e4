#!/usr/bin/env python3
"""Walk the two bundled discourses and show how the readings come about.

Resolves the pronoun discourse (matched reading, no rule violation), then
the parallel-subject discourse with and without the parallelism penalty,
printing the reference games' predictions and the salience trajectory.
"""

from dataclasses import replace
from pathlib import Path

from meaning_games import load_discourse, load_game, predict, resolve

DATA = Path(__file__).resolve().parent.parent / "src" / "meaning_games" / "data"


def show(title, report):
    print(f"== {title}")
    for r in report.resolutions:
        status = r.entity if r.resolved else f"ambiguous {r.alternatives}"
        print(f"  u{r.utterance_index} {r.slot_id}: {r.surface!r} -> {status}  [{r.via}]")
        if r.locally_suboptimal:
            print(f"      locally suboptimal constituents: {', '.join(r.locally_suboptimal)}")
    if report.rule1 is None:
        print("  pronoun rule: not evaluated (unresolved slots)")
    elif report.rule1:
        for v in report.rule1:
            print(
                f"  pronoun rule violated at u{v.utterance_index}: backward center "
                f"{v.backward_center} realized as {v.center_form.value} while "
                f"{', '.join(v.pronoun_realized)} got the pronoun"
            )
    else:
        print("  pronoun rule: satisfied")
    salience = ", ".join(f"{k}={v:.3f}" for k, v in sorted(report.state.salience.items()))
    print(f"  final salience: {salience}")
    print()


def main():
    game = load_game(DATA / "fig2.game")
    prediction = predict(game)
    print("== reference game prediction")
    for m, c in sorted(prediction.interpretation().items()):
        print(f"  {m!r} -> {c}")
    print()

    show("pronoun discourse", resolve(load_discourse(DATA / "he_man.disc")))

    discourse = load_discourse(DATA / "man_him.disc")
    show("parallel-subject discourse (penalty on)", resolve(discourse))
    config = replace(discourse.config, parallelism_penalty=0.0)
    show("parallel-subject discourse (penalty off)", resolve(discourse, config))


if __name__ == "__main__":
    main()

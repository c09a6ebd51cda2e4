#!/usr/bin/env python3
"""Survey the truncated mutual-simulation dynamic over random estimate pairs.

Samples pairs of game estimates (shared alphabet and edge structure, costs
and priors drawn independently), runs the alternating best responses, and
tallies how the sequences end: fixed immediately, fixed after some steps,
or cycling.  Oscillation needs genuinely conflicting estimates and partial
grammaticality, so it is rare; the first cycling pair found is printed in
full.  The frozen instance in the test suite came from this sweep.

Usage: python scripts/level_k_dynamics.py [--trials N] [--seed S] [--depth D]
"""

import argparse
import random
from collections import Counter

from meaning_games import (
    Content,
    LevelKConfig,
    MeaningGame,
    Message,
    Prior,
    UtilityModel,
    level_k_strategies,
)


def random_pair(rng):
    nc = rng.choice([2, 3, 3, 4])
    nm = rng.choice([2, 3, 3, 4])
    cids = [f"c{i}" for i in range(nc)]
    mids = [f"m{j}" for j in range(nm)]
    while True:
        edges = {(c, m) for c in cids for m in mids if rng.random() < 0.8}
        if all(any((c, m) in edges for m in mids) for c in cids) and all(
            any((c, m) in edges for c in cids) for m in mids
        ):
            break

    def one_game():
        raw = [rng.randint(1, 20) for _ in cids]
        total = sum(raw)
        return MeaningGame(
            tuple(Content(c) for c in cids),
            tuple(Message(m) for m in mids),
            Prior({c: w / total for c, w in zip(cids, raw)}),
            UtilityModel(
                round(rng.uniform(0.05, 2.5), 2),
                round(rng.uniform(0.05, 2.5), 2),
                {e: round(rng.uniform(0.0, 3.0), 2) for e in edges},
                {(m, c): round(rng.uniform(0.0, 3.0), 2) for (c, m) in edges},
            ),
        )

    return one_game(), one_game()


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=20000)
    parser.add_argument("--seed", type=int, default=777)
    parser.add_argument("--depth", type=int, default=12)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    outcomes = Counter()
    example = None
    for _ in range(args.trials):
        g_s, g_r = random_pair(rng)
        rule = rng.choice(["prior", "uniform"])
        result = level_k_strategies(g_s, g_r, LevelKConfig(depth=args.depth, off_path=rule))
        if result.oscillating:
            outcomes["oscillating"] += 1
            if example is None:
                example = (g_s, g_r, rule, result)
        elif result.converged:
            outcomes[f"fixed@{result.fixed_point_level}"] += 1
        else:
            outcomes["undetermined"] += 1

    print(f"{args.trials} estimate pairs, depth {args.depth}:")
    for key in sorted(outcomes):
        print(f"  {key:>14}: {outcomes[key]}")

    if example:
        g_s, g_r, rule, result = example
        print(f"\nfirst oscillating pair (off-path rule {rule!r}, "
              f"cycle starts at level {result.cycle_start}, period {result.cycle_period}):")
        print(f"  sender estimate:   prior={g_s.prior.weights}")
        print(f"    bonuses=({g_s.utility.sender_bonus}, {g_s.utility.receiver_bonus})")
        print(f"    sender costs={g_s.utility.sender_cost}")
        print(f"    receiver costs={g_s.utility.receiver_cost}")
        print(f"  receiver estimate: prior={g_r.prior.weights}")
        print(f"    bonuses=({g_r.utility.sender_bonus}, {g_r.utility.receiver_bonus})")
        print(f"    sender costs={g_r.utility.sender_cost}")
        print(f"    receiver costs={g_r.utility.receiver_cost}")
        for k, (s, r) in enumerate(result.levels):
            smap = {c: max(row, key=row.get) for c, row in s.rows.items()}
            rmap = {m: max(row, key=row.get) for m, row in r.rows.items()}
            print(f"  level {k}: sender {smap}  receiver {rmap}")


if __name__ == "__main__":
    main()

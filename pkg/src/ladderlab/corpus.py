"""Seeded random instance corpora for the oracle cross-checks."""

from __future__ import annotations

import random
from .algebra import make_field
from .colouring import FilterD
from .errors import InfeasibleParams
from .instance import Instance
from .ladder import GenParams, generate

FIELDS = ((2, 1), (3, 1), (2, 2))


def random_instance(rng: random.Random, max_horizon: int = 6, max_length: int = 3,
                    max_s: int = 3, regime: str | None = None) -> Instance:
    """Draw parameters until the generator accepts them."""
    while True:
        p, m = rng.choice(FIELDS)
        F = make_field(p, m)
        horizon = rng.randint(2, max_horizon)
        length = rng.randint(1, min(max_length, horizon - 1))
        window = sorted(rng.sample(range(length), rng.randint(1, length)))
        room = list(range(length, horizon))
        low = 2 if regime == "overlapping" else 1
        high = min(max_s, len(room))
        if high < low:
            continue
        # favour larger S: small systems are cheap but say little
        k = high if rng.random() < 0.5 else rng.randint(low, high)
        reg = regime or rng.choice(("separated", "overlapping"))
        if reg == "separated":
            # separated window steps need a coordinate strictly between
            # consecutive deltas, so keep gaps of at least 2
            chosen: list[int] = []
            for d in rng.sample(room, len(room)):
                if len(chosen) < k and all(abs(d - e) >= 2 for e in chosen):
                    chosen.append(d)
            S = tuple(sorted(chosen))
        else:
            S = tuple(sorted(rng.sample(room, k)))
        if reg == "separated" and len(S) > 1 and rng.random() < 0.5:
            window = [length - 1]  # always feasible, so multi-delta systems survive
        seed = rng.randrange(1 << 30)
        try:
            sys = generate(seed, GenParams(horizon, length, S, tuple(window), reg, F))
        except InfeasibleParams:
            continue
        return Instance(sys, FilterD(length, frozenset(window)), {}, seed, reg)


def generate_corpus(seed: int, count: int, **kwargs) -> list[Instance]:
    rng = random.Random(seed)
    out = []
    for i in range(count):
        inst = random_instance(rng, **kwargs)
        inst.name = f"corpus-{seed}-{i:03d}"
        out.append(inst)
    return out

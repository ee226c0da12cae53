#!/usr/bin/env python3
"""Agreement sweep: the cause search against the brute-force enumerator and
the structural-equation checker, over randomly generated small models."""

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from oracle import oracle_find_causes  # noqa: E402

from causalmc.causality import CauseQuery, find_causes  # noqa: E402
from causalmc.generate import random_configuration, random_system_model  # noqa: E402
from causalmc.hp import HPCauseQuery, export_hp, hp_check_actual_cause  # noqa: E402
from causalmc.model import reachable  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--models", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20260810)
    args = ap.parse_args()

    started = time.perf_counter()
    causes = disagreements = hp_failures = 0
    for i in range(args.models):
        rng = random.Random(args.seed + i)
        model = random_system_model(rng, max_components=3, max_behaviours=3)
        f1 = random_configuration(rng, model)
        reach = reachable(model, f1)
        f2 = rng.choice(reach) if reach else random_configuration(rng, model)
        changed = [c for c in model.component_order if f1[c] != f2[c]]
        pool = changed if changed else list(model.component_order)
        effect = tuple(sorted(rng.sample(pool, rng.randint(1, len(pool)))))
        certs = find_causes(model, CauseQuery(f1, f2, effect))
        got = {frozenset(c.cause_set) for c in certs}
        want = oracle_find_causes(model, f1, f2, effect)
        if got != want:
            disagreements += 1
            print(f"disagreement at seed {args.seed + i}: engine {got} oracle {want}")
        hp = export_hp(model, f1)
        for cert in certs:
            causes += 1
            hq = HPCauseQuery.build(
                {c: f2[c] for c in cert.cause_set},
                {c: f2[c] for c in effect},
                path=cert.ac1_path,
            )
            if not hp_check_actual_cause(hp, hq).is_cause:
                hp_failures += 1
                print(f"equation check rejected a cause at seed {args.seed + i}: {cert.cause_set}")
    elapsed = time.perf_counter() - started
    print(
        f"{args.models} models, {causes} causes, {disagreements} enumerator disagreements, "
        f"{hp_failures} equation-check rejections, {elapsed:.1f}s"
    )
    return 0 if disagreements == 0 and hp_failures == 0 else 1


if __name__ == "__main__":
    raise SystemExit(main())

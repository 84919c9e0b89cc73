"""Sweep every operator and functional identity over a lattice grid.

Prints one row per (lattice, identity) with the worst residual seen over
randomized trials. With the exact backend every residual must be exactly
zero; with bigfloat they sit at rounding level.

    python scripts/identity_sweep.py --trials 25 --seed 3
    python scripts/identity_sweep.py --backend bigfloat --precision 192
"""

from __future__ import annotations

import argparse
import random
from fractions import Fraction

from latticeops import (
    FUNCTIONAL_IDENTITIES,
    OPERATOR_IDENTITIES,
    Lattice,
    MomentFunctional,
    Polynomial,
    make_field,
    verify_functional_identity,
    verify_operator_identity,
)

GRID = [
    ("q = 1/9 symmetric", Fraction(1, 9), (Fraction(1, 2), Fraction(1, 2), 0)),
    ("q = 1/4 offset", Fraction(1, 4), (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5))),
    ("q = 4 offset", 4, (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5))),
    ("q = 25/4 symmetric", Fraction(25, 4), (Fraction(1, 2), Fraction(1, 2), 0)),
    ("quadratic s^2", 1, (1, 0, 0)),
    ("quadratic general", 1, (2, Fraction(1, 3), Fraction(-1, 4))),
    ("linear s", 1, (0, 1, 0)),
]


def random_poly(field, rng, max_degree):
    deg = rng.randint(1, max_degree)
    coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(deg)]
    coeffs.append(Fraction(rng.randint(1, 9), rng.randint(1, 9)))
    return Polynomial(field, coeffs)


def random_functional(field, seed):
    def ext(k):
        rr = random.Random(f"{seed}:{k}")
        return field(Fraction(rr.randint(-9, 9), rr.randint(1, 9)))

    return MomentFunctional(field, extender=ext)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--backend", choices=("exact", "bigfloat"), default="exact")
    ap.add_argument("--precision", type=int, default=None)
    ap.add_argument("--trials", type=int, default=15)
    ap.add_argument("--max-degree", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    field = make_field(args.backend, precision=args.precision)
    rng = random.Random(args.seed)
    failures = 0
    print(f"{'lattice':24} {'identity':18} {'worst residual':>16}")
    for label, q, c in GRID:
        lat = Lattice(field, q, c)
        for identity in OPERATOR_IDENTITIES:
            worst = 0.0
            for _ in range(args.trials):
                f = random_poly(field, rng, args.max_degree)
                g = random_poly(field, rng, args.max_degree)
                rep = verify_operator_identity(lat, identity, f, g, n=rng.randint(1, 4))
                worst = max(worst, rep.residual)
                failures += not rep.passed
            print(f"{label:24} {identity:18} {worst:16.3e}")
        for identity in FUNCTIONAL_IDENTITIES:
            if identity == "leibniz_deg2" and not lat.is_q_lattice:
                continue
            worst = 0.0
            for t in range(max(1, args.trials // 3)):
                if identity == "leibniz_deg2":
                    f = Polynomial(
                        field,
                        (Fraction(1, 3), Fraction(-1, 2), Fraction(2, 5)),
                    )
                else:
                    f = random_poly(field, rng, 4)
                u = random_functional(field, rng.randint(0, 10**9))
                rep = verify_functional_identity(
                    lat, identity, f, u, n=rng.randint(1, 3), horizon=8
                )
                worst = max(worst, rep.residual)
                failures += not rep.passed
            print(f"{label:24} {identity:18} {worst:16.3e}")
    print(f"\n{failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Scan the raising-relation construction over a range of C_1 values.

For each C_1 the construction yields a resolvent parameter r, a Pearson
pair, and a closed-form recurrence. The scan reports, per C_1:

* r and whether it hits the excluded set (q^(n-1) or -q^(-n)),
* the worst disagreement with askey_wilson(sqrt(r), -sqrt(r),
  i/sqrt(rq), -i/sqrt(rq)) over the first coefficients,
* the first slot where the raising relation D_x P_(n+1) =
  (gamma_(n+1)/alpha_n) S_x P_n breaks (empirically slot 3 whenever the
  family is regular, despite the perfect recurrence/family agreement).

    python scripts/raising_construction_scan.py --q 1/4 --count 12
"""

from __future__ import annotations

import argparse
from fractions import Fraction

from latticeops import (
    Lattice,
    OPSequence,
    check_structure,
    make_family,
    make_field,
    regularity,
    solve_first_characterization,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=Fraction, default=Fraction(1, 4))
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--precision", type=int, default=192)
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--branch", choices=("+", "-"), default="+")
    args = ap.parse_args()

    field = make_field("bigfloat", precision=args.precision)
    lat = Lattice(field, args.q, (Fraction(1, 2), Fraction(1, 2), 0))

    print(
        f"{'C_1':>10} {'r':>24} {'excluded':>8} {'regular':>7} "
        f"{'aw residual':>12} {'first_fail':>10}"
    )
    for k in range(1, args.count + 1):
        c1 = Fraction(-k, 3 * k + 7)  # a spread of negative rationals
        fc = solve_first_characterization(lat, c1, branch=args.branch)
        reg = regularity(fc.pair, args.n_max).regular
        root_r = field.sqrt(fc.r)
        root_rq = field.sqrt(fc.r * lat.q)
        aw = make_family(
            "askey_wilson",
            lat,
            (root_r, -root_r, field.i / root_rq, -field.i / root_rq),
        ).ttrr
        aw_resid = max(
            field.magnitude(aw.c(m) - fc.ttrr.c(m))
            for m in range(1, args.n_max + 2)
        )
        rep = check_structure(lat, OPSequence(field, fc.ttrr), "sx_raise", args.n_max)
        print(
            f"{str(c1):>10} {field.to_str(fc.r)[:24]:>24} "
            f"{str(fc.excluded_index):>8} {str(reg):>7} "
            f"{aw_resid:12.3e} {str(rep.first_fail):>10}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

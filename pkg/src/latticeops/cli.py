"""Command line front end.

Subcommands map onto the library layers:

* ``verify``        random-trial checks of the operator and functional identities
* ``moments``       moment table of the functional solving a Pearson equation
* ``classify``      regularity decision (plus Rodrigues / asymptotics add-ons)
* ``family``        displayed recurrence data for the named family
* ``characterize``  structure-relation checks and the raising construction
* ``all``           a small canned battery of everything above

Exit codes: 0 all checks passed, 1 a check failed, 2 invalid input.

Lattice specs are JSON (inline or a file path):
``{"kind": "q-quadratic", "q": "1/4", "c": ["1/2", "1/2", "0"]}``;
Pearson pairs are ``{"phi": [...], "psi": [...]}`` with coefficient
arrays listed lowest degree first.  Scalars accept "p/q" strings,
``[re, im]`` pairs, or bigfloat value objects.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from typing import List, Optional

from . import families
from .characterize import (
    check_meixner_linear,
    check_structure,
    check_system,
    counterexample_ttrr,
    solve_first_characterization,
)
from .classical import (
    PearsonPair,
    asymptotics,
    regularity,
    rodrigues_verify,
    ttrr_from_pearson,
)
from .functionals import (
    FUNCTIONAL_IDENTITIES,
    MomentFunctional,
    NotRegularError,
    OPSequence,
    ttrr_oracle,
    verify_functional_identity,
)
from .lattice import Lattice, LatticeError
from .operators import OPERATOR_IDENTITIES, verify_operator_identity
from .polynomials import Polynomial
from .scalars import ScalarDomainError, make_field

DEFAULT_LATTICE = {"kind": "q-quadratic", "q": "1/4", "c": ["1/2", "1/2", "0"]}

VERIFY_GROUPS = {
    "ops": OPERATOR_IDENTITIES,
    "duals": ("dual_product_dx", "dual_product_sx", "dual_dxn_sx"),
    "leibniz": ("leibniz", "leibniz_deg2"),
}


class CliError(ValueError):
    pass


def _load_spec(raw: Optional[str], default=None):
    if raw is None:
        if default is None:
            raise CliError("a JSON spec is required here")
        return default
    text = raw.strip()
    if not text.startswith("{"):
        try:
            with open(text, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError(f"cannot read spec file {raw!r}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON spec: {exc}") from exc


def _field_from_args(args):
    return make_field(args.backend, precision=args.precision,
                      eps=None if args.eps is None else Fraction(args.eps))


def _lattice_from_args(args, field) -> Lattice:
    spec = _load_spec(getattr(args, "lattice", None), default=DEFAULT_LATTICE)
    return Lattice.from_json(field, spec)


def _pair_from_args(args, lat: Lattice) -> PearsonPair:
    spec = _load_spec(args.pair)
    return PearsonPair.from_json(lat, spec)


def _emit(args, payload, csv_rows=None, csv_header=None) -> None:
    if args.format == "csv":
        if csv_rows is None:
            raise CliError("csv output is not defined for this command")
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(csv_header)
        writer.writerows(csv_rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _random_poly(field, rng: random.Random, max_degree: int) -> Polynomial:
    deg = rng.randint(1, max_degree)
    coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(deg)]
    coeffs.append(Fraction(rng.choice([k for k in range(-9, 10) if k]), rng.randint(1, 9)))
    return Polynomial(field, coeffs)


def _random_functional(field, seed: int) -> MomentFunctional:
    def ext(k: int):
        rr = random.Random(f"{seed}:{k}")
        return field(Fraction(rr.randint(-9, 9), rr.randint(1, 9)))

    return MomentFunctional(field, extender=ext)


def _battery_lattices(field) -> List[Lattice]:
    return [
        Lattice(field, Fraction(1, 4), (Fraction(1, 2), Fraction(1, 2), 0)),
        Lattice(field, 4, (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5))),
        Lattice(field, 1, (1, 0, 0)),
        Lattice(field, 1, (0, 1, 0)),
    ]


def cmd_verify(args) -> int:
    field = _field_from_args(args)
    rng = random.Random(args.seed)
    if args.lattice is not None:
        lattices = [_lattice_from_args(args, field)]
    else:
        lattices = _battery_lattices(field)
    identities = VERIFY_GROUPS[args.group]
    results = []
    worst = 0.0
    ok = True
    for lat in lattices:
        for identity in identities:
            if identity == "leibniz_deg2" and not lat.is_q_lattice:
                continue
            for _ in range(args.trials):
                f = _random_poly(field, rng, args.max_degree)
                n = rng.randint(1, 4)
                if args.group == "ops":
                    g = _random_poly(field, rng, args.max_degree)
                    rep = verify_operator_identity(lat, identity, f, g, n=n)
                else:
                    if identity == "leibniz_deg2":
                        f2 = Polynomial(field, (
                            Fraction(rng.randint(-9, 9), rng.randint(1, 9)),
                            Fraction(rng.randint(-9, 9), rng.randint(1, 9)),
                            Fraction(rng.choice([k for k in range(-9, 10) if k]),
                                     rng.randint(1, 9)),
                        ))
                        f = f2
                    u = _random_functional(field, rng.randint(0, 10**9))
                    rep = verify_functional_identity(
                        lat, identity, f, u, n=min(n, 3), horizon=args.horizon)
                worst = max(worst, rep.residual)
                if not rep.passed:
                    ok = False
                results.append({
                    "lattice": lat.to_json(),
                    "identity": identity,
                    "residual": rep.residual,
                    "passed": rep.passed,
                })
    payload = {
        "group": args.group,
        "trials": args.trials,
        "max_degree": args.max_degree,
        "seed": args.seed,
        "worst_residual": worst,
        "passed": ok,
        "results": results,
    }
    _emit(args, payload)
    return 0 if ok else 1


def cmd_moments(args) -> int:
    field = _field_from_args(args)
    lat = _lattice_from_args(args, field)
    pair = _pair_from_args(args, lat)
    u = pair.moments()
    values = u.moments(args.n_max)
    payload = {
        "lattice": lat.to_json(),
        "pair": pair.to_json(),
        "moments": [field.to_json(v) for v in values],
    }
    rows = [(n, field.to_str(v)) for n, v in enumerate(values)]
    _emit(args, payload, csv_rows=rows, csv_header=("n", "moment"))
    return 0


def cmd_classify(args) -> int:
    field = _field_from_args(args)
    lat = _lattice_from_args(args, field)
    pair = _pair_from_args(args, lat)
    report = regularity(pair, args.n_max)
    payload = {
        "lattice": lat.to_json(),
        "pair": pair.to_json(),
        "regularity": report.to_json(field),
    }
    ok = report.regular
    if args.rodrigues is not None:
        rod = rodrigues_verify(pair, args.rodrigues, horizon=args.horizon)
        payload["rodrigues"] = rod.to_json()
        ok = ok and rod.passed
    if args.asymptotics is not None:
        payload["asymptotics"] = asymptotics(pair, args.asymptotics).to_json(field)
    _emit(args, payload)
    return 0 if ok else 1


def cmd_family(args) -> int:
    field = _field_from_args(args)
    lat = _lattice_from_args(args, field)
    params = tuple(field.from_json(p) for p in json.loads(args.params))
    spec = families.make_family(args.name, lat, params)
    restr = families.check_restrictions(spec, args.n_max)
    payload = {
        "family": args.name,
        "lattice": lat.to_json(),
        "params": [field.to_json(p) for p in params],
        "restrictions": restr.to_json(),
        "ttrr": spec.ttrr.to_json(args.n_max),
    }
    rows = [
        (n, field.to_str(b), field.to_str(c))
        for n, b, c in spec.ttrr.rows(args.n_max)
    ]
    _emit(args, payload, csv_rows=rows, csv_header=("n", "b", "c"))
    return 0 if restr.ok else 1


def cmd_characterize(args) -> int:
    field = _field_from_args(args)
    lat = _lattice_from_args(args, field)
    if args.solve_c1 is not None:
        fc = solve_first_characterization(lat, Fraction(args.solve_c1),
                                          branch=args.branch)
        seq = OPSequence(field, fc.ttrr)
        rep = check_structure(lat, seq, "sx_raise", args.n_max)
        closed_resid = max(
            field.magnitude(fc.ttrr.c(m) - fc.c_closed(m))
            for m in range(1, args.n_max + 2)
        )
        payload = {
            "construction": {
                "c1": field.to_json(fc.c1),
                "branch": fc.branch,
                "r": field.to_json(fc.r),
                "kappa": field.to_json(fc.kappa),
                "excluded_index": fc.excluded_index,
            },
            "pair": fc.pair.to_json(),
            "ttrr": fc.ttrr.to_json(args.n_max),
            "closed_form_residual": closed_resid,
            "relation": rep.to_json(),
        }
        _emit(args, payload)
        return 0 if rep.passed else 1
    relation = args.relation
    if relation is None:
        raise CliError("characterize needs --relation or --solve-c1")
    if relation == "counterexample":
        try:
            rep = check_structure(lat, None, "counterexample4term", args.n_max)
        except ScalarDomainError as exc:
            raise CliError(
                "the exact backend needs q to be a fourth power of a "
                "rational (try q=1/16, or use --backend bigfloat)") from exc
        payload = {"lattice": lat.to_json(), "relation": rep.to_json()}
        _emit(args, payload)
        return 0 if rep.passed else 1
    if relation == "meixner":
        b0 = field.from_json(args.b0)
        c1 = field.from_json(args.c1)
        rep = check_meixner_linear(lat, b0, c1, args.n_max)
        payload = {
            "lattice": lat.to_json(),
            "b0": field.to_json(b0),
            "c1": field.to_json(c1),
            "relation": rep.to_json(),
        }
        _emit(args, payload)
        return 0 if rep.passed else 1
    if args.family is None:
        raise CliError(f"--relation {relation} needs --family")
    params = tuple(field.from_json(p) for p in json.loads(args.params))
    spec = families.make_family(args.family, lat, params)
    if relation == "system":
        sysrep = check_system(lat, spec.ttrr, args.n_max)
        payload = {
            "family": args.family,
            "lattice": lat.to_json(),
            "system": sysrep.to_json(field),
        }
        _emit(args, payload)
        return 0 if sysrep.passed else 1
    seq = OPSequence(field, spec.ttrr)
    rep = check_structure(lat, seq, relation, args.n_max)
    payload = {
        "family": args.family,
        "lattice": lat.to_json(),
        "relation": rep.to_json(),
    }
    _emit(args, payload)
    return 0 if rep.passed else 1


def _battery(seed: int) -> List[dict]:
    checks = []

    def record(name: str, passed: bool, **extra):
        row = {"check": name, "passed": bool(passed)}
        row.update(extra)
        checks.append(row)

    exact = make_field("exact")
    rng = random.Random(seed)
    ok = True
    for lat in _battery_lattices(exact):
        for identity in OPERATOR_IDENTITIES:
            f = _random_poly(exact, rng, 6)
            g = _random_poly(exact, rng, 6)
            rep = verify_operator_identity(lat, identity, f, g, n=rng.randint(1, 3))
            ok = ok and rep.passed
    record("operator-identities", ok)

    ok = True
    for lat in _battery_lattices(exact)[:2]:
        for identity in FUNCTIONAL_IDENTITIES:
            f = _random_poly(exact, rng, 4)
            u = _random_functional(exact, rng.randint(0, 10**9))
            if identity == "leibniz_deg2":
                f = Polynomial(exact, (Fraction(1, 3), Fraction(-1, 2), Fraction(2, 5)))
            rep = verify_functional_identity(lat, identity, f, u, n=2, horizon=8)
            ok = ok and rep.passed
    record("functional-identities", ok)

    qlat = Lattice(exact, 4, (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5)))
    pair = PearsonPair(
        qlat,
        Polynomial(exact, (Fraction(7, 10), Fraction(-1, 3), Fraction(2, 7))),
        Polynomial(exact, (Fraction(1, 2), Fraction(3, 4))),
    )
    ttrr = ttrr_from_pearson(pair)
    oracle = ttrr_oracle(pair.moments(), 6)
    record(
        "oracle-equivalence",
        all(oracle.b(n) == ttrr.b(n) and oracle.c(n + 1) == ttrr.c(n + 1)
            for n in range(7)),
    )
    record("rodrigues", rodrigues_verify(pair, 3, horizon=8).passed)

    sym = Lattice(exact, Fraction(1, 4), (Fraction(1, 2), Fraction(1, 2), 0))
    degenerate = solve_first_characterization(sym, Fraction(-225, 128))
    reg = regularity(degenerate.pair, 5)
    caught = None
    try:
        ttrr_oracle(degenerate.pair.moments(), 5)
    except NotRegularError as exc:
        caught = exc.level
    record(
        "regularity-biconditional",
        (not reg.regular) and caught is not None and caught <= 3,
        oracle_zero_level=caught,
    )

    big = make_field("bigfloat", precision=192)
    cx = check_structure(
        Lattice(big, Fraction(1, 4), (Fraction(1, 2), Fraction(1, 2), 0)),
        None, "counterexample4term", 8)
    record("counterexample-4term", cx.passed,
           max_residual=max(cx.residuals))

    qh = families.make_family("q_hermite", sym, ())
    lower = check_structure(sym, OPSequence(exact, qh.ttrr), "lower", 10)
    sysrep = check_system(sym, qh.ttrr, 10)
    record("q-hermite-lower-and-system", lower.passed and sysrep.passed)
    cheb = families.make_family("chebyshev_u", sym, ())
    cheb_lower = check_structure(sym, OPSequence(exact, cheb.ttrr), "lower", 6)
    cheb_sys = check_system(sym, cheb.ttrr, 10)
    record("chebyshev-lower-fails-system-passes",
           cheb_lower.first_fail == 2 and cheb_sys.passed)

    linlat = Lattice(exact, 1, (0, 1, 0))
    quadlat = Lattice(exact, 1, (2, Fraction(1, 3), Fraction(-1, 4)))
    lin = check_meixner_linear(linlat, Fraction(1, 3), Fraction(2, 5), 8)
    quad = check_meixner_linear(quadlat, Fraction(1, 3), Fraction(2, 5), 5)
    record("raising-linear-vs-quadratic",
           lin.passed and quad.first_fail is not None and quad.first_fail <= 3)

    construct = solve_first_characterization(sym, Fraction(-9, 32))
    closed_ok = all(construct.ttrr.c(m) == construct.c_closed(m)
                    for m in range(1, 9))
    b_ok = all(construct.ttrr.b(n) == exact.zero for n in range(9))
    record("raising-construction-consistency", closed_ok and b_ok)

    bpair = PearsonPair(
        Lattice(big, Fraction(1, 2), (Fraction(1, 2), Fraction(1, 2), 0)),
        Polynomial(big, (Fraction(7, 10), Fraction(-1, 3), Fraction(2, 7))),
        Polynomial(big, (Fraction(1, 2), Fraction(3, 4))),
    )
    arep = asymptotics(bpair, 80, sum_horizon=32)
    record("asymptotics", arep.sum_residual <= 1e-20 and arep.ratio_error < 1e-6)
    return checks


def cmd_all(args) -> int:
    checks = _battery(args.seed)
    passed = all(c["passed"] for c in checks)
    _emit(args, {"checks": checks, "passed": passed, "seed": args.seed})
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticeops",
        description="verification kernel for orthogonal polynomials on "
                    "quadratic and q-quadratic lattices",
    )
    parser.add_argument("--backend", choices=("exact", "bigfloat"), default="exact")
    parser.add_argument("--precision", type=int, default=None,
                        help="bigfloat precision in bits")
    parser.add_argument("--eps", default=None,
                        help="bigfloat zero threshold, e.g. 1e-30")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--out", default=None, help="write output to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="random-trial identity checks")
    p.add_argument("group", choices=sorted(VERIFY_GROUPS))
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--max-degree", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=int, default=10)
    p.add_argument("--lattice", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("moments", help="moments of the Pearson functional")
    p.add_argument("--lattice", default=None)
    p.add_argument("--pair", required=True)
    p.add_argument("-N", "--n-max", type=int, default=10)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("classify", help="regularity decision for a pair")
    p.add_argument("--lattice", default=None)
    p.add_argument("--pair", required=True)
    p.add_argument("-N", "--n-max", type=int, default=10)
    p.add_argument("--rodrigues", type=int, default=None,
                   help="also verify the Rodrigues representation at this order")
    p.add_argument("--horizon", type=int, default=10)
    p.add_argument("--asymptotics", type=int, default=None,
                   help="also report recurrence asymptotics at this index")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("family", help="displayed recurrence data for a family")
    p.add_argument("--name", required=True, choices=sorted(families.FAMILY_NAMES))
    p.add_argument("--params", default="[]", help='JSON array, e.g. \'["1/2", "-1/2"]\'')
    p.add_argument("--lattice", default=None)
    p.add_argument("-N", "--n-max", type=int, default=10)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("characterize", help="structure relations and constructions")
    p.add_argument("--relation",
                   choices=("sx_raise", "lower", "counterexample", "system",
                            "meixner"),
                   default=None)
    p.add_argument("--family", default=None, choices=sorted(families.FAMILY_NAMES))
    p.add_argument("--params", default="[]")
    p.add_argument("--lattice", default=None)
    p.add_argument("--b0", default="1/3",
                   help="B_0 for --relation meixner (scalar spec)")
    p.add_argument("--c1", default="2/5",
                   help="C_1 for --relation meixner (scalar spec)")
    p.add_argument("-N", "--n-max", type=int, default=12)
    p.add_argument("--solve-c1", default=None,
                   help="run the raising construction from this C_1 (rational)")
    p.add_argument("--branch", choices=("+", "-"), default="+")
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("all", help="canned verification battery")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_all)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, LatticeError, ScalarDomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

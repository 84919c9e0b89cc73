"""Structure-relation checkers and the characterization constructions.

Four relation checks run against an orthogonal sequence:

* ``sx_raise``:   D_x P_(n+1) = (gamma_(n+1)/alpha_n) S_x P_n
* ``lower``:      D_x P_(n+1) = gamma_(n+1) P_n
* ``counterexample4term``: the four-term D_x relation, on the symmetric
  lattice of base q, for the continuous dual q-Hahn family of base
  q^(1/2) at parameters (1, -1, q^(1/4))
* ``system``:     the five nonlinear difference equations that the TTRR
  coefficients of any solution of ``lower`` must satisfy

plus the constructive directions: recovering the Pearson pair a
structure relation forces, solving the raising case from its one free
parameter C_1, and the Meixner-kind image that solves the raising
relation on linear lattices (and provably cannot on quadratic ones).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Tuple

from .classical import InternalCheckError, PearsonPair, ttrr_from_pearson
from .functionals import OPSequence, TTRRCoeffs
from .lattice import Lattice, LatticeError
from .operators import dx, sx
from .polynomials import Polynomial
from .scalars import Field

RELATIONS = ("sx_raise", "lower", "counterexample4term", "system")


@dataclass
class StructureReport:
    relation: str
    residuals: List[float]
    first_fail: Optional[int]
    passed: bool
    detail: str = ""

    def to_json(self):
        return {
            "relation": self.relation,
            "residuals": self.residuals,
            "first_fail": self.first_fail,
            "passed": self.passed,
            "detail": self.detail,
        }


def _poly_pass(field: Field, diff: Polynomial, scale: float) -> bool:
    if field.name == "exact":
        return diff.is_zero
    return diff.max_abs_coeff() <= field.magnitude(field.eps) * max(1.0, scale)


def check_structure(lat: Lattice, seq: Optional[OPSequence], relation: str,
                    n_max: int) -> StructureReport:
    if relation == "counterexample4term":
        return _check_counterexample(lat, n_max)
    if seq is None:
        raise ValueError(f"relation {relation!r} needs an orthogonal sequence")
    field = lat.field
    con = lat.constants
    residuals: List[float] = []
    first_fail: Optional[int] = None
    if relation == "sx_raise":
        for n in range(n_max + 1):
            lhs = dx(lat, seq.p(n + 1))
            rhs = (con.gamma_n(n + 1) / con.alpha_n(n)) * sx(lat, seq.p(n))
            diff = lhs - rhs
            residuals.append(diff.max_abs_coeff())
            ok = _poly_pass(field, diff, max(lhs.max_abs_coeff(), rhs.max_abs_coeff()))
            if not ok and first_fail is None:
                first_fail = n
    elif relation == "lower":
        for n in range(n_max + 1):
            lhs = dx(lat, seq.p(n + 1))
            rhs = con.gamma_n(n + 1) * seq.p(n)
            diff = lhs - rhs
            residuals.append(diff.max_abs_coeff())
            ok = _poly_pass(field, diff, max(lhs.max_abs_coeff(), rhs.max_abs_coeff()))
            if not ok and first_fail is None:
                first_fail = n
    else:
        raise ValueError(f"unknown structure relation {relation!r}")
    return StructureReport(
        relation=relation,
        residuals=residuals,
        first_fail=first_fail,
        passed=first_fail is None,
    )


def counterexample_ttrr(lat: Lattice) -> TTRRCoeffs:
    """The B_n, C_n of the four-term counterexample family.

    `lat` is the lattice the relation is checked on (base q); the family
    itself lives at base q^(1/2), and its data are Laurent polynomials
    in r4 := q^(1/4).  On the exact backend q must therefore be a
    rational fourth power.
    """
    field = lat.field
    _require_symmetric(lat)
    r4 = field.sqrt(lat.sqrt_q)
    one = field.one

    def b_fn(n: int):
        return (
            (one + r4**-2) * r4 ** (2 * n) + one - r4**-2
        ) * r4 ** (2 * n + 1) / 2

    def c_fn(n: int):
        return (
            (one + r4 ** (2 * (n - 1)))
            * (one - r4 ** (2 * n))
            * (one - r4 ** (4 * n - 2))
            / 4
        )

    return TTRRCoeffs(field, b_fn, c_fn)


def _require_symmetric(lat: Lattice) -> None:
    field = lat.field
    half = field(1) / 2
    if lat.kind != "q-quadratic" or not (
        field.approx_eq(lat.c[0], half)
        and field.approx_eq(lat.c[1], half)
        and field.approx_eq(lat.c[2], field.zero)
    ):
        raise LatticeError(
            "the four-term counterexample needs the symmetric lattice "
            "x(s) = (q^(-s) + q^s)/2"
        )


def _check_counterexample(lat: Lattice, n_max: int) -> StructureReport:
    field = lat.field
    _require_symmetric(lat)
    con = lat.constants
    alpha = con.alpha
    r4 = field.sqrt(lat.sqrt_q)
    ttrr = counterexample_ttrr(lat)
    seq = OPSequence(field, ttrr)

    def b_of(n: int):
        return ttrr.b_fn(n)

    def c_big(n: int):
        return ttrr.c_fn(n)

    def c_small(n: int):
        return c_big(n) * r4 ** (-(2 * n - 1))

    one = field.one
    a2m1 = alpha * alpha - one
    pi_poly = Polynomial(field, (-one, 0, one))  # z^2 - 1
    residuals: List[float] = []
    first_fail: Optional[int] = None
    for n in range(n_max + 1):
        lhs = a2m1 * (pi_poly * dx(lat, seq.p(n)))
        rhs = a2m1 * con.gamma_n(n) * seq.p(n + 1)
        rhs = rhs + (
            c_small(n + 1) - alpha * c_small(n) + (one - alpha) * con.alpha_n(n) * b_of(n)
        ) * seq.p(n)
        rhs = rhs + (
            (b_of(n) - alpha * b_of(n - 1)) * c_small(n) + (one - alpha * alpha) * con.gamma_n(n) * c_big(n)
        ) * seq.p(n - 1)
        rhs = rhs + (
            c_small(n - 1) * c_big(n) - alpha * c_small(n) * c_big(n - 1)
        ) * seq.p(n - 2)
        diff = lhs - rhs
        residuals.append(diff.max_abs_coeff())
        ok = _poly_pass(field, diff, max(lhs.max_abs_coeff(), rhs.max_abs_coeff()))
        if not ok and first_fail is None:
            first_fail = n
    return StructureReport(
        relation="counterexample4term",
        residuals=residuals,
        first_fail=first_fail,
        passed=first_fail is None,
        detail=f"relation base {field.to_str(lat.q)}, family base sqrt of that",
    )


def pearson_from_ttrr(lat: Lattice, case: str, b0, c1, b1=None, c2=None) -> PearsonPair:
    """The Pearson pair forced on u by a structure relation.

    case "sx_raise" needs (B_0, C_1); case "lower" needs (B_0, C_1, B_1, C_2).
    """
    field = lat.field
    b0 = field(b0)
    c1 = field(c1)
    if not c1:
        raise ValueError("C_1 must be nonzero for a regular functional")
    con = lat.constants
    alpha = con.alpha
    beta = con.beta
    z = Polynomial.monomial(field, 1)
    if case == "sx_raise":
        psi = Polynomial(field, (b0, -field.one))
        if lat.is_q_lattice:
            inv_alpha = field.one / alpha
            phi = (alpha - inv_alpha) * (
                (z - lat.c[2]) * (z - b0)
            ) + inv_alpha * c1
        else:
            phi = 2 * beta * (z - b0) + c1
        return PearsonPair(lat, phi, psi)
    if case == "lower":
        if b1 is None or c2 is None:
            raise ValueError("case 'lower' needs B_1 and C_2 as well")
        b1 = field(b1)
        c2 = field(c2)
        if not c2:
            raise ValueError("C_2 must be nonzero for a regular functional")
        frak_a = alpha * (2 * c1 - c2) / c2
        frak_b = beta - b0 + 2 * alpha * b1 * c1 / c2
        psi = z - b0
        phi = (frak_a * z - frak_b) * (z - b0) - (frak_a + alpha) * c1
        return PearsonPair(lat, phi, psi)
    raise ValueError(f"unknown construction case {case!r}")


@dataclass
class SystemReport:
    k1: object
    k2: object
    residuals: Dict[str, List[float]] = dc_field(default_factory=dict)
    max_residuals: Dict[str, float] = dc_field(default_factory=dict)
    t_closed_residual: float = 0.0
    passed: bool = True

    def to_json(self, field: Field):
        return {
            "k1": field.to_json(self.k1),
            "k2": field.to_json(self.k2),
            "max_residuals": self.max_residuals,
            "t_closed_residual": self.t_closed_residual,
            "passed": self.passed,
            "residuals": self.residuals,
        }


def check_system(lat: Lattice, ttrr: TTRRCoeffs, n_max: int) -> SystemReport:
    """Residuals of the five difference equations forced by ``lower``.

    c_n := gamma_n; t_n := c_n/C_n for n >= 1 and t_0 := k1 + k2, where
    k1, k2 are fitted from t_1, t_2 through t_n = k1 q^(n/2) + k2 q^(-n/2).
    """
    if not lat.is_q_lattice:
        raise LatticeError("the difference system is stated for q-lattices")
    field = lat.field
    con = lat.constants
    q = lat.q
    sq = lat.sqrt_q
    c1c2 = lat.c[0] * lat.c[1]
    c3 = lat.c[2]
    alpha = con.alpha

    def c_of(n: int):
        return con.gamma_n(n)

    t_cache: Dict[int, object] = {}

    def t_of(n: int):
        if n not in t_cache:
            if n == 0:
                t_cache[n] = k1 + k2
            else:
                cn = ttrr.c(n)
                if not cn:
                    raise ValueError(f"C_{n} = 0: t_{n} undefined")
                t_cache[n] = c_of(n) / cn
        return t_cache[n]

    t1 = c_of(1) / ttrr.c(1)
    t2 = c_of(2) / ttrr.c(2)
    det = field.one / sq - sq
    k1 = (t1 / q - t2 / sq) / det
    k2 = (t2 * sq - t1 * q) / det

    t_closed_residual = 0.0
    for n in range(1, n_max + 1):
        closed = k1 * sq**n + k2 * sq**-n
        t_closed_residual = max(
            t_closed_residual, field.magnitude(t_of(n) - closed)
        )

    def b_off(n: int):
        return ttrr.b(n) - c3

    residuals: Dict[str, List[float]] = {}
    scales: Dict[str, float] = {}

    def record(tag: str, value, scale):
        residuals.setdefault(tag, []).append(field.magnitude(value))
        scales[tag] = max(scales.get(tag, 1.0), field.magnitude(scale))

    for n in range(0, n_max - 1):
        record("eq1", c_of(n + 2) - 2 * alpha * c_of(n + 1) + c_of(n), c_of(n + 2))
        record("eq2", t_of(n + 2) - 2 * alpha * t_of(n + 1) + t_of(n), t_of(n + 2))
    for n in range(0, n_max - 2):
        record(
            "eq3",
            t_of(n + 3) * b_off(n + 2)
            - (t_of(n + 2) + t_of(n + 1)) * b_off(n + 1)
            + t_of(n) * b_off(n),
            t_of(n + 3) * b_off(n + 2),
        )
    for n in range(2, n_max - 1):
        lhs = (
            (t_of(n + 1) + t_of(n + 2)) * (ttrr.c(n + 1) - c1c2)
            - 2 * (field.one + alpha) * t_of(n) * (ttrr.c(n) - c1c2)
            + (t_of(n - 1) + t_of(n - 2)) * (ttrr.c(n - 1) - c1c2)
        )
        rhs = t_of(n) * (
            b_off(n) ** 2 - 2 * alpha * b_off(n) * b_off(n - 1) + b_off(n - 1) ** 2
        )
        record("eq4", lhs - rhs, lhs)
    for n in range(1, n_max):
        record(
            "eq5",
            c_of(n + 1) * b_off(n + 1)
            + (field.one - 2 * alpha) * b_off(n)
            + c_of(n) * b_off(n - 1),
            c_of(n + 1) * b_off(n + 1),
        )

    max_residuals = {tag: max(vals) if vals else 0.0 for tag, vals in residuals.items()}
    if field.name == "exact":
        passed = all(v == 0.0 for v in max_residuals.values())
    else:
        eps = field.magnitude(field.eps)
        passed = all(
            max_residuals[tag] <= eps * max(1.0, scales.get(tag, 1.0))
            for tag in max_residuals
        )
    return SystemReport(
        k1=k1,
        k2=k2,
        residuals=residuals,
        max_residuals=max_residuals,
        t_closed_residual=t_closed_residual,
        passed=passed,
    )


@dataclass
class FirstCharacterization:
    pair: PearsonPair
    ttrr: TTRRCoeffs
    r: object
    kappa: object
    c1: object
    branch: str
    excluded_index: Optional[int]

    def c_closed(self, m: int):
        """Closed form of C_m predicted by the raising characterization."""
        lat = self.pair.lattice
        field = lat.field
        q = lat.q
        one = field.one
        n = m - 1
        c1c2 = lat.c[0] * lat.c[1]

        def qp(k: int):
            return q**k if k >= 0 else (one / q) ** (-k)

        return (
            c1c2
            * (one + qp(n - 2))
            * (one - qp(n + 1))
            * (one + self.r * qp(n))
            * (one - qp(n - 1) / self.r)
            / ((one + qp(2 * n - 2)) * (one + qp(2 * n)))
        )

    def witness_closed(self, n: int):
        """Closed form of phi^[n] at the regularity witness point."""
        lat = self.pair.lattice
        field = lat.field
        q = lat.q
        one = field.one
        c1c2 = lat.c[0] * lat.c[1]
        alpha = lat.constants.alpha
        qn = q**n
        return (
            c1c2
            * (q - one)
            / (2 * alpha)
            * (one + self.r * qn)
            * (one - qn / (self.r * q))
            / qn
        )


def solve_first_characterization(lat: Lattice, c1, branch: str = "+",
                                 excluded_scan: int = 64) -> FirstCharacterization:
    """Solve D_x P_(n+1) = (gamma_(n+1)/alpha_n) S_x P_n from C_1 alone.

    Returns the forced Pearson pair (with B_0 = c3), the closed-form
    TTRR, and the parameter r (quadratic in C_1; `branch` picks the
    sign of the square root).  The round trip C_1(r) == C_1 is asserted.
    """
    if lat.kind != "q-quadratic":
        raise LatticeError("the raising characterization needs a q-quadratic lattice")
    field = lat.field
    c1 = field(c1)
    if not c1:
        raise ValueError("C_1 must be nonzero")
    q = lat.q
    one = field.one
    c1c2 = lat.c[0] * lat.c[1]
    alpha = lat.constants.alpha
    kappa = (c1 + 2 * (alpha * alpha - one) * c1c2) / ((one - q) * c1c2)
    root = field.sqrt(one / q + kappa * kappa)
    if branch == "+":
        r = kappa + root
    elif branch == "-":
        r = kappa - root
    else:
        raise ValueError("branch must be '+' or '-'")
    if not r:
        raise ValueError("degenerate parameter r = 0")
    c1_back = (one - one / q) * (one + one / r) * (one - r * q) * c1c2 / 2
    if not field.approx_eq(c1_back, c1):
        raise InternalCheckError("C_1 round trip through r failed")
    excluded_index = None
    for n in range(excluded_scan + 1):
        qn1 = q ** (n - 1) if n >= 1 else one / q
        if field.approx_eq(r, qn1) or field.approx_eq(r, -(one / q) ** n):
            excluded_index = n
            break
    c3 = lat.c[2]
    inv_alpha = one / alpha
    z = Polynomial.monomial(field, 1)
    phi = -(alpha - inv_alpha) * ((z - c3) * (z - c3)) - inv_alpha * c1
    psi = z - c3
    pair = PearsonPair(lat, phi, psi)
    return FirstCharacterization(
        pair=pair,
        ttrr=ttrr_from_pearson(pair),
        r=r,
        kappa=kappa,
        c1=c1,
        branch=branch,
        excluded_index=excluded_index,
    )


def meixner_image_ttrr(lat: Lattice, b0, c1) -> TTRRCoeffs:
    """TTRR of (i c5/2)^n M_n(2i(B_0 - z)/c5; 0, -4 C_1/c5^2) on a linear lattice."""
    field = lat.field
    if lat.is_q_lattice or lat.c[0] != field.zero or lat.c[1] == field.zero:
        raise LatticeError("the Meixner-kind image lives on a linear lattice")
    b0 = field(b0)
    c1 = field(c1)
    c5 = lat.c[1]

    def c_fn(m: int):
        value = m * (c1 - (m - 1) * c5 * c5 / 4)
        if not value:
            raise ValueError(
                f"C_{m} = 0: 4*C_1/c5^2 = {m - 1} violates the non-integrality condition"
            )
        return value

    return TTRRCoeffs(field, lambda n: b0, c_fn)


def check_meixner_linear(lat: Lattice, b0, c1, n_max: int) -> StructureReport:
    """The raising relation for the Meixner-kind image.

    On a linear lattice the image family satisfies
    D_x P_(n+1) = (n+1) S_x P_n for all n; on a quadratic lattice
    (beta != 0) the pair-generated sequence must fail it at small n,
    which is exactly what the report shows.
    """
    field = lat.field
    if lat.is_q_lattice:
        raise LatticeError("this check compares linear against quadratic lattices")
    if lat.is_constant:
        raise LatticeError("a constant lattice has no raising relation to check")
    if lat.c[0] == field.zero:
        ttrr = meixner_image_ttrr(lat, b0, c1)
        seq = OPSequence(field, ttrr)
        report = check_structure(lat, seq, "sx_raise", n_max)
        report.detail = "meixner-kind image on a linear lattice"
        return report
    pair = pearson_from_ttrr(lat, "sx_raise", b0, c1)
    seq = OPSequence(field, ttrr_from_pearson(pair))
    report = check_structure(lat, seq, "sx_raise", n_max)
    report.detail = "pair-generated sequence on a quadratic lattice (beta != 0)"
    return report

"""Pearson pairs on a lattice: regularity, closed recurrence data, Rodrigues.

A pair (phi, psi) with deg phi <= 2, deg psi <= 1 defines a functional u
through D(phi*u) = S(psi*u).  This module decides admissibility and
regularity, produces the closed-form recurrence coefficients B_n and
C_(n+1), the iterated pairs (phi^[k], psi^[k]) with their functionals
u^[k], the Rodrigues-type representation P_n u = k_n D^n u^[k], and the
asymptotic behaviour of the recurrence coefficients.

Every closed form is cross-checked: iterated pairs against their
defining recursion, moments against the Pearson recursion, recurrence
coefficients against the moment oracle (in the test-suite), so a
transcription slip in any one route cannot pass silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .functionals import (
    AdmissibilityError,
    MomentFunctional,
    OPSequence,
    TTRRCoeffs,
    dual_dx,
    dual_dx_pow,
    dual_sx,
    left_mul,
    pearson_moments,
)
from .lattice import Lattice, LatticeError
from .operators import dx, sx
from .polynomials import Polynomial
from .scalars import Field


class InternalCheckError(RuntimeError):
    """Two supposedly equivalent computation routes disagreed."""


class PearsonPair:
    """phi = a z^2 + b z + c and psi = d z + e on a fixed lattice."""

    def __init__(self, lattice: Lattice, phi: Polynomial, psi: Polynomial):
        if phi.degree > 2:
            raise ValueError("phi must have degree <= 2")
        if psi.degree > 1:
            raise ValueError("psi must have degree <= 1")
        if phi.is_zero and psi.is_zero:
            raise ValueError("the Pearson pair (0, 0) is degenerate")
        self.lattice = lattice
        self.field = lattice.field
        self.phi = phi
        self.psi = psi
        self._iterated: List[Tuple[Polynomial, Polynomial]] = [(phi, psi)]

    @property
    def a(self):
        return self.phi.coeff(2)

    @property
    def b(self):
        return self.phi.coeff(1)

    @property
    def c(self):
        return self.phi.coeff(0)

    @property
    def d(self):
        return self.psi.coeff(1)

    @property
    def e(self):
        return self.psi.coeff(0)

    def d_value(self, n: int):
        """d_n = a gamma_n + d alpha_n, the admissibility sequence."""
        con = self.lattice.constants
        return self.a * con.gamma_n(n) + self.d * con.alpha_n(n)

    def e_value(self, n: int):
        """e_n, the companion sequence entering B_n and the witnesses."""
        lat = self.lattice
        con = lat.constants
        if lat.is_q_lattice:
            c3 = lat.c[2]
            return self.phi.derivative()(c3) * con.gamma_n(n) + self.psi(
                c3
            ) * con.alpha_n(n)
        beta = con.beta
        return self.b * n + self.e + 2 * beta * self.d * (n * n)

    def iterated(self, k: int, validate: bool = True) -> Tuple[Polynomial, Polynomial]:
        """(phi^[k], psi^[k]); recursion and closed form must agree.

        With validate=False only the closed form is evaluated, which keeps
        deep indices (growth limits probe k around 10^4) cheap; the dual
        route stays on for every validated index.
        """
        lat = self.lattice
        field = self.field
        if not validate and k >= len(self._iterated):
            return self._iterated_closed(k)
        u1 = lat.u1()
        u2 = lat.u2()
        alpha = lat.constants.alpha
        while len(self._iterated) <= k:
            phi_j, psi_j = self._iterated[-1]
            j = len(self._iterated)
            phi_next = sx(lat, phi_j) + u1 * sx(lat, psi_j) + alpha * (
                u2 * dx(lat, psi_j)
            )
            psi_next = dx(lat, phi_j) + alpha * sx(lat, psi_j) + u1 * dx(lat, psi_j)
            phi_closed, psi_closed = self._iterated_closed(j)
            for name, rec, closed in (
                ("phi", phi_next, phi_closed),
                ("psi", psi_next, psi_closed),
            ):
                diff = rec - closed
                if field.name == "exact":
                    bad = not diff.is_zero
                else:
                    scale = max(1.0, rec.max_abs_coeff(), closed.max_abs_coeff())
                    bad = diff.max_abs_coeff() > field.magnitude(field.eps) * scale
                if bad:
                    raise InternalCheckError(
                        f"{name}^[{j}] closed form disagrees with the recursion"
                    )
            self._iterated.append((phi_closed, psi_closed))
        return self._iterated[k]

    def _iterated_closed(self, k: int) -> Tuple[Polynomial, Polynomial]:
        lat = self.lattice
        field = self.field
        con = lat.constants
        if lat.is_q_lattice:
            c1, c2, c3 = lat.c
            alpha = con.alpha
            a2m1 = alpha * alpha - field.one
            zc = Polynomial(field, (-c3, field.one))
            phid_c3 = self.phi.derivative()(c3)
            psi_c3 = self.psi(c3)
            d2k = self.d_value(2 * k)
            ek = self.e_value(k)
            psi_k = d2k * zc + ek
            phi_k = (
                (self.d * a2m1 * con.gamma_n(2 * k) + self.a * con.alpha_n(2 * k))
                * (zc * zc - 2 * c1 * c2)
                + (phid_c3 * con.alpha_n(k) + psi_c3 * a2m1 * con.gamma_n(k)) * zc
                + self.phi(c3)
                + 2 * self.a * c1 * c2
            )
            return phi_k, psi_k
        beta = con.beta
        c4, c5, c6 = lat.c
        a, b, d, e = self.a, self.b, self.d, self.e
        dk = a * k + d
        bk2 = beta * (k * k)
        z = Polynomial.monomial(field, 1)
        phi_k = (
            a * (z * z)
            + (b + 6 * beta * k * dk) * z
            + self.phi(bk2)
            + 2 * beta * k * self.psi(bk2)
            - field(k) / 4 * (16 * beta * c6 - c5 * c5) * dk
        )
        d2k = self.d_value(2 * k)
        ek = self.e_value(k)
        psi_k = d2k * (z + bk2) + ek
        return phi_k, psi_k

    def moments(self, mu0=1) -> MomentFunctional:
        return pearson_moments(self.lattice, (self.phi, self.psi))

    def to_json(self):
        return {
            "phi": self.phi.to_json(),
            "psi": self.psi.to_json(),
        }

    @classmethod
    def from_json(cls, lattice: Lattice, obj) -> "PearsonPair":
        if not isinstance(obj, dict) or "phi" not in obj or "psi" not in obj:
            raise ValueError("pair spec must be an object with 'phi' and 'psi'")
        field = lattice.field
        return cls(
            lattice,
            Polynomial.from_json(field, obj["phi"]),
            Polynomial.from_json(field, obj["psi"]),
        )

    def __repr__(self):
        return f"PearsonPair(phi={self.phi!r}, psi={self.psi!r})"


def _scalar_is_zero(field: Field, value, scale=1.0) -> bool:
    if field.name == "exact":
        return not value
    return field.is_zero(value, scale=scale)


@dataclass
class AdmissibilityReport:
    values: List
    first_zero: Optional[int]

    @property
    def admissible(self) -> bool:
        return self.first_zero is None

    def to_json(self, field: Field):
        return {
            "admissible": self.admissible,
            "first_zero": self.first_zero,
            "d_n": [field.to_json(v) for v in self.values],
        }


def admissibility(pair: PearsonPair, n_max: int) -> AdmissibilityReport:
    """d_n for n <= n_max, cross-checked against (gamma_n/2) phi'' + alpha_n psi'."""
    field = pair.field
    con = pair.lattice.constants
    phi_dd = 2 * pair.a
    psi_d = pair.d
    values = []
    first_zero = None
    for n in range(n_max + 1):
        dn = pair.d_value(n)
        alt = con.gamma_n(n) / 2 * phi_dd + con.alpha_n(n) * psi_d
        if not field.approx_eq(dn, alt):
            raise InternalCheckError(f"two d_{n} formulas disagree")
        values.append(dn)
        if first_zero is None and _scalar_is_zero(field, dn):
            first_zero = n
    return AdmissibilityReport(values=values, first_zero=first_zero)


@dataclass
class RegularityRow:
    n: int
    d_n: object
    e_n: object
    witness: object
    witness_zero: bool


@dataclass
class RegularityReport:
    rows: List[RegularityRow]
    admissibility_first_zero: Optional[int]
    witness_first_zero: Optional[int]

    @property
    def regular(self) -> bool:
        return self.admissibility_first_zero is None and self.witness_first_zero is None

    @property
    def verdict(self) -> str:
        if self.admissibility_first_zero is not None:
            return f"fails-admissibility-at-{self.admissibility_first_zero}"
        if self.witness_first_zero is not None:
            return f"zero-witness-at-{self.witness_first_zero}"
        return "regular-through-horizon"

    def to_json(self, field: Field):
        return {
            "regular": self.regular,
            "verdict": self.verdict,
            "rows": [
                {
                    "n": r.n,
                    "d_n": field.to_json(r.d_n),
                    "e_n": field.to_json(r.e_n),
                    "witness": field.to_json(r.witness),
                    "witness_zero": r.witness_zero,
                }
                for r in self.rows
            ],
        }


def witness_point(pair: PearsonPair, n: int):
    """The point where phi^[n] must not vanish for u to stay regular."""
    lat = pair.lattice
    dn2 = pair.d_value(2 * n)
    if _scalar_is_zero(pair.field, dn2):
        raise AdmissibilityError(2 * n)
    ratio = pair.e_value(n) / dn2
    if lat.is_q_lattice:
        return lat.c[2] - ratio
    return -lat.constants.beta * (n * n) - ratio


def regularity(pair: PearsonPair, n_max: int) -> RegularityReport:
    """Decide regularity through level n_max via d_n and the phi^[n] witnesses."""
    field = pair.field
    adm = admissibility(pair, 2 * n_max + 1)
    rows: List[RegularityRow] = []
    witness_zero_at = None
    for n in range(n_max + 1):
        dn = adm.values[n]
        en = pair.e_value(n)
        if adm.first_zero is not None and 2 * n >= adm.first_zero:
            break
        phi_n, _ = pair.iterated(n)
        w = phi_n(witness_point(pair, n))
        wz = _scalar_is_zero(field, w, scale=max(1.0, phi_n.max_abs_coeff()))
        rows.append(RegularityRow(n=n, d_n=dn, e_n=en, witness=w, witness_zero=wz))
        if wz and witness_zero_at is None:
            witness_zero_at = n
    return RegularityReport(
        rows=rows,
        admissibility_first_zero=adm.first_zero,
        witness_first_zero=witness_zero_at,
    )


def _checked_d(pair: PearsonPair, n: int):
    v = pair.d_value(n)
    if _scalar_is_zero(pair.field, v):
        raise AdmissibilityError(n)
    return v


def b_offset(pair: PearsonPair, n: int):
    """B_n minus its lattice offset (c3 for q-lattices), formed without
    cancellation so the q^n-scale tail survives finite precision."""
    lat = pair.lattice
    con = lat.constants
    if lat.is_q_lattice:
        first = (
            con.gamma_n(n) * pair.e_value(n - 1) / _checked_d(pair, 2 * n - 2)
            if n >= 1
            else pair.field.zero
        )
        return first - con.gamma_n(n + 1) * pair.e_value(n) / _checked_d(pair, 2 * n)
    beta = con.beta
    first = (
        n * pair.e_value(n - 1) / _checked_d(pair, 2 * n - 2)
        if n >= 1
        else pair.field.zero
    )
    return (
        first
        - (n + 1) * pair.e_value(n) / _checked_d(pair, 2 * n)
        - 2 * beta * (n * (n - 1))
    )


def ttrr_from_pearson(pair: PearsonPair) -> TTRRCoeffs:
    """Closed-form recurrence coefficients of the orthogonal sequence of u."""
    lat = pair.lattice
    field = pair.field
    con = lat.constants

    def b_fn(n: int):
        base = lat.c[2] if lat.is_q_lattice else field.zero
        return base + b_offset(pair, n)

    def c_fn(m: int):
        n = m - 1
        phi_n, _ = pair.iterated(n, validate=False)
        w = phi_n(witness_point(pair, n))
        gamma_next = con.gamma_n(n + 1) if lat.is_q_lattice else field(n + 1)
        if n == 0:
            # d_(n-1) appears in both numerator and denominator; cancel it
            # so pairs with d_(-1) = 0 still get their valid C_1
            return -gamma_next * w / _checked_d(pair, 1)
        num = gamma_next * pair.d_value(n - 1)
        return -num / (_checked_d(pair, 2 * n - 1) * _checked_d(pair, 2 * n + 1)) * w

    return TTRRCoeffs(field, b_fn, c_fn)


def rodrigues_constant(pair: PearsonPair, n: int):
    """k_n with P_n u = k_n D^n u^[n]."""
    field = pair.field
    alpha = pair.lattice.constants.alpha
    k = (-alpha) ** (-n) if n else field.one
    k = field(k)
    for j in range(1, n + 1):
        k = k / pair.d_value(n + j - 2)
    return k


def uk_functional(pair: PearsonPair, k: int,
                  u: Optional[MomentFunctional] = None) -> MomentFunctional:
    """u^[k]: u^[0] = u and u^[k+1] = D(U2 psi^[k] u^[k]) - S(phi^[k] u^[k])."""
    lat = pair.lattice
    if u is None:
        u = pair.moments()
    u2 = lat.u2()
    for j in range(k):
        phi_j, psi_j = pair.iterated(j)
        u = dual_dx(lat, left_mul(u, u2 * psi_j)) - dual_sx(lat, left_mul(u, phi_j))
    return u


@dataclass
class RodriguesReport:
    n: int
    residual: float
    passed: bool

    def to_json(self):
        return {"n": self.n, "residual": self.residual, "passed": self.passed}


def rodrigues_verify(pair: PearsonPair, n: int, horizon: int = 10) -> RodriguesReport:
    """Compare the moments of P_n u with k_n D^n u^[n] up to `horizon`."""
    field = pair.field
    lat = pair.lattice
    u = pair.moments()
    seq = OPSequence(field, ttrr_from_pearson(pair))
    lhs = left_mul(u, seq.p(n))
    rhs = rodrigues_constant(pair, n) * dual_dx_pow(lat, uk_functional(pair, n, u), n)
    residual = 0.0
    scale = 1.0
    exact_ok = True
    for m in range(horizon + 1):
        a = lhs.moment(m)
        b = rhs.moment(m)
        residual = max(residual, field.magnitude(a - b))
        scale = max(scale, field.magnitude(a), field.magnitude(b))
        if a != b:
            exact_ok = False
    if field.name == "exact":
        passed = exact_ok
    else:
        passed = residual <= field.magnitude(field.eps) * scale
    return RodriguesReport(n=n, residual=residual, passed=passed)


@dataclass
class AsymptoticsReport:
    kind: str
    sum_residual: Optional[float] = None
    ratio_limit: Optional[object] = None
    ratio_estimate: Optional[object] = None
    ratio_error: Optional[float] = None
    series_value: Optional[object] = None
    series_estimate: Optional[object] = None
    series_error: Optional[float] = None
    b_scaled_limit: Optional[object] = None
    b_scaled_estimate: Optional[object] = None
    b_scaled_error: Optional[float] = None
    c_scaled_limit: Optional[object] = None
    c_scaled_estimate: Optional[object] = None
    c_scaled_error: Optional[float] = None

    def to_json(self, field: Field):
        def enc(v):
            return None if v is None else (field.to_json(v) if not isinstance(v, float) else v)

        return {
            "kind": self.kind,
            "sum_residual": self.sum_residual,
            "ratio_limit": enc(self.ratio_limit),
            "ratio_estimate": enc(self.ratio_estimate),
            "ratio_error": self.ratio_error,
            "series_value": enc(self.series_value),
            "series_estimate": enc(self.series_estimate),
            "series_error": self.series_error,
            "b_scaled_limit": enc(self.b_scaled_limit),
            "b_scaled_estimate": enc(self.b_scaled_estimate),
            "b_scaled_error": self.b_scaled_error,
            "c_scaled_limit": enc(self.c_scaled_limit),
            "c_scaled_estimate": enc(self.c_scaled_estimate),
            "c_scaled_error": self.c_scaled_error,
        }


def partial_sum_closed(pair: PearsonPair, n: int):
    """Closed form of S_n = sum_(j<n) (B_j - c3) on a q-lattice."""
    if not pair.lattice.is_q_lattice:
        raise LatticeError("the telescoped partial sum is a q-lattice statement")
    if n == 0:
        return pair.field.zero
    con = pair.lattice.constants
    return -con.gamma_n(n) * pair.e_value(n - 1) / _checked_d(pair, 2 * n - 2)


def asymptotics(pair: PearsonPair, n_eval: int, sum_horizon: int = 64) -> AsymptoticsReport:
    """Limit behaviour of the recurrence coefficients, checked numerically.

    q-lattices: the telescoped partial-sum identity, the geometric decay
    rate of B_n - c3 and the value of the full series.  Quadratic
    lattices: the n^2 and n^4 growth constants of B_n and C_(n+1).
    """
    lat = pair.lattice
    field = pair.field
    con = lat.constants
    if lat.is_q_lattice:
        q = lat.q
        c3 = lat.c[2]
        alpha = con.alpha
        uval = field.one / (lat.sqrt_q - field.one / lat.sqrt_q)
        psi_c3 = pair.psi(c3)
        phid_c3 = pair.phi.derivative()(c3)
        a, d = pair.a, pair.d
        sum_residual = 0.0
        running = field.zero
        for j in range(sum_horizon):
            running = running + b_offset(pair, j)
            closed = partial_sum_closed(pair, j + 1)
            sum_residual = max(sum_residual, field.magnitude(running - closed))
        q_below_one = field.magnitude(q) < 1
        denom = d - 2 * a * uval if q_below_one else d + 2 * a * uval
        if _scalar_is_zero(field, denom):
            return AsymptoticsReport(kind=lat.kind, sum_residual=sum_residual)
        numer = psi_c3 - 4 * alpha * uval * uval * phid_c3
        if q_below_one:
            ratio_limit = -(numer / (uval * denom)) / lat.sqrt_q
            series_value = (psi_c3 - 2 * uval * phid_c3) / ((q - field.one) * denom)
            scale_pow = (field.one / q) ** n_eval
        else:
            ratio_limit = lat.sqrt_q * numer / (uval * denom)
            series_value = (psi_c3 + 2 * uval * phid_c3) / (
                (field.one / q - field.one) * denom
            )
            scale_pow = q**n_eval
        ratio_estimate = scale_pow * b_offset(pair, n_eval)
        series_estimate = partial_sum_closed(pair, n_eval)
        return AsymptoticsReport(
            kind=lat.kind,
            sum_residual=sum_residual,
            ratio_limit=ratio_limit,
            ratio_estimate=ratio_estimate,
            ratio_error=field.magnitude(ratio_estimate - ratio_limit),
            series_value=series_value,
            series_estimate=series_estimate,
            series_error=field.magnitude(series_estimate - series_value),
        )
    beta = con.beta
    if _scalar_is_zero(field, beta):
        raise LatticeError("quadratic-growth limits need a quadratic lattice (beta != 0)")
    a_zero = _scalar_is_zero(field, pair.a)
    b_limit = -8 * beta if a_zero else -2 * beta
    c_limit = 16 * beta * beta if a_zero else beta * beta
    n = n_eval
    b_est = b_offset(pair, n) / field(n * n)
    ttrr = ttrr_from_pearson(pair)
    c_est = ttrr.c(n + 1) / field(n**4)
    return AsymptoticsReport(
        kind=lat.kind,
        b_scaled_limit=b_limit,
        b_scaled_estimate=b_est,
        b_scaled_error=field.magnitude(b_est - b_limit),
        c_scaled_limit=c_limit,
        c_scaled_estimate=c_est,
        c_scaled_error=field.magnitude(c_est - c_limit),
    )

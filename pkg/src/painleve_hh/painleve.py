"""Dominant balances, resonances and the (C, lambda) classification.

Near a movable singularity t0, leading behaviors x ~ a*(t-t0)^alpha,
y ~ b*(t-t0)^beta of the model come in two flavors:

* Case 1: alpha = beta = -2, a = +-3*sqrt(2+C), b = -3, with resonances
  {-1, 6, 5/2 +- sqrt(1 - 24*(1+C))/2};
* Case 2 (y dominates): alpha = (1 +- sqrt(1 - 48/C))/2, beta = -2,
  b = 6/C, a arbitrary, with resonances {-1, 0, 6, -+sqrt(1 - 48/C)}
  where the alpha branch taking the minus sign carries the plus
  resonance.

Resonances are computed both from those closed forms and from the roots of
the linearized (Kowalevski) 2x2 determinant polynomial around the leading
behavior; the two routes must agree to 1e-20.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from .errors import UnsupportedParameter
from .scalars import Scalar, as_scalar, nth_root

RESONANCE_AGREEMENT_TOL = mpmath.mpf("1e-20")


@dataclass(frozen=True)
class DominantBalance:
    case_tag: str                 # "Case1" | "Case2"
    alpha: Scalar
    beta: Scalar
    a_alpha: Scalar | None        # None marks the arbitrary c1 of Case 2
    b_beta: Scalar
    sign_choices: dict = field(default_factory=dict)
    logarithmic: bool = False

    @property
    def a_is_free(self) -> bool:
        return self.a_alpha is None


@dataclass(frozen=True)
class ResonanceSet:
    values: tuple
    all_integer: bool
    has_extra_negative: bool


@dataclass(frozen=True)
class ClassificationVerdict:
    label: str                    # integrable-candidate | three-parameter-candidate
    detail: str                   # | logarithmic | generic
    balances: tuple               # of (DominantBalance, ResonanceSet)


def _require_nonzero_C(C: Scalar):
    if C.is_zero():
        raise UnsupportedParameter(
            "C = 0 is outside the family: the y-dominant balance divides by C"
        )


def find_dominant_balances(C) -> list[DominantBalance]:
    """All leading behaviors for the given C (C != 0).

    Both Case-1 sign branches are returned, except at C = -2 where the
    Case-1 leading coefficient a vanishes and the true dominant term is
    logarithmic; that degenerate balance is returned once, flagged.
    """
    C = as_scalar(C)
    _require_nonzero_C(C)
    minus2 = Scalar.exact(-2)
    balances = []
    a_sq = C + 2
    if a_sq.is_zero():
        balances.append(DominantBalance(
            case_tag="Case1", alpha=minus2, beta=minus2,
            a_alpha=Scalar.exact(0), b_beta=Scalar.exact(-3),
            sign_choices={"a": "degenerate"}, logarithmic=True,
        ))
    else:
        root = nth_root(a_sq, 2, 0) * 3
        for sign, val in (("+", root), ("-", -root)):
            balances.append(DominantBalance(
                case_tag="Case1", alpha=minus2, beta=minus2,
                a_alpha=val, b_beta=Scalar.exact(-3),
                sign_choices={"a": sign},
            ))
    s = nth_root(Scalar.exact(1) - Scalar.exact(48) / C, 2, 0)
    half = Scalar.exact(1, 2)
    for sign, alpha in (("-", (Scalar.exact(1) - s) * half),
                        ("+", (Scalar.exact(1) + s) * half)):
        balances.append(DominantBalance(
            case_tag="Case2", alpha=alpha, beta=minus2,
            a_alpha=None, b_beta=Scalar.exact(6) / C,
            sign_choices={"alpha": sign},
        ))
    return balances


def _poly_mul(p, q):
    out = [Scalar.exact(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def kowalevski_polynomial(balance: DominantBalance, C: Scalar) -> list:
    """Coefficients (ascending in r) of the linearization determinant.

    Perturbing the leading behavior by eps*t^(alpha+r) / eps*t^(beta+r) and
    keeping the dominant orders of both equations gives a 2x2 system in the
    perturbation amplitudes; its determinant is a quartic in r whose roots
    are the resonances.
    """
    C = as_scalar(C)
    b = balance.b_beta
    # q(r) = (r-2)(r-3): the y-row second-derivative factor at beta = -2
    q = [Scalar.exact(6), Scalar.exact(-5), Scalar.exact(1)]
    if balance.case_tag == "Case1":
        row_x = [q[0] + 2 * b, q[1], q[2]]
        row_y = [q[0] - 2 * C * b, q[1], q[2]]
        prod = _poly_mul(row_x, row_y)
        # coupling -4*a^2 with a^2 = 9*(2+C) kept exact
        a_sq = Scalar.exact(9) * (C + 2)
        prod[0] = prod[0] - 4 * a_sq
        return prod
    # Case 2: x-row (alpha+r)(alpha+r-1) + 2b, y-row decoupled at leading order
    alpha = balance.alpha
    p = [alpha * (alpha - 1) + 2 * b, 2 * alpha - 1, Scalar.exact(1)]
    row_y = [q[0] - 2 * C * b, q[1], q[2]]
    return _poly_mul(p, row_y)


def _poly_roots(coeffs, bits):
    with mp.workprec(bits + 40):
        cs = [c.mpc(bits) for c in coeffs]
        while len(cs) > 1 and abs(cs[-1]) == 0:
            cs.pop()
        roots = mpmath.polyroots(list(reversed(cs)), maxsteps=200, extraprec=80)
    return list(roots)


def _table_resonances(balance: DominantBalance, C: Scalar) -> list[Scalar]:
    minus_one = Scalar.exact(-1)
    six = Scalar.exact(6)
    if balance.case_tag == "Case1":
        d = nth_root(Scalar.exact(1) - Scalar.exact(24) * (C + 1), 2, 0)
        half = Scalar.exact(1, 2)
        base = Scalar.exact(5, 2)
        return [minus_one, six, base - d * half, base + d * half]
    # r = 1 - 2*alpha pairs the minus-alpha branch with the plus resonance
    r4 = Scalar.exact(1) - 2 * balance.alpha
    return [minus_one, Scalar.exact(0), six, r4]


def _is_integer(v: Scalar) -> bool:
    if v.is_exact:
        return v.fraction().denominator == 1
    z = v.mpc()
    if z.imag != 0:
        return False
    with mp.workprec(max(v.precision, 128)):
        return abs(z.real - mpmath.nint(z.real)) <= RESONANCE_AGREEMENT_TOL


def resonances(balance: DominantBalance, C, cross_check: bool = True) -> ResonanceSet:
    """Resonance exponents of a balance, table formula vs Kowalevski matrix.

    The closed-form table values are authoritative for the returned set;
    when cross_check is on, the determinant-polynomial roots must match
    them as a multiset to 1e-20 or a RuntimeError is raised.
    """
    C = as_scalar(C)
    _require_nonzero_C(C)
    table = _table_resonances(balance, C)
    if cross_check:
        bits = max(C.precision, 128)
        roots = _poly_roots(kowalevski_polynomial(balance, C), bits)
        if len(roots) != len(table):
            raise RuntimeError("resonance polynomial degree mismatch")
        with mp.workprec(bits):
            remaining = list(roots)
            for v in table:
                z = v.mpc(bits)
                best = min(range(len(remaining)),
                           key=lambda i: abs(remaining[i] - z))
                if abs(remaining[best] - z) > RESONANCE_AGREEMENT_TOL:
                    raise RuntimeError(
                        f"table resonance {v!r} not matched by Kowalevski root "
                        f"(nearest off by "
                        f"{mpmath.nstr(abs(remaining[best] - z), 5)})"
                    )
                remaining.pop(best)
    values = tuple(table)
    all_integer = all(_is_integer(v) for v in values)
    negatives = 0
    for v in values:
        if v.is_exact and v.fraction() < 0:
            negatives += 1
        elif not v.is_exact and v.is_real() and v.mpc().real < -RESONANCE_AGREEMENT_TOL:
            negatives += 1
    return ResonanceSet(values=values, all_integer=all_integer,
                        has_extra_negative=negatives > 1)


_INTEGRABLE = (
    (Fraction(-1), Fraction(1)),
    (Fraction(-6), None),          # any lambda
    (Fraction(-16), Fraction(1, 16)),
)
_THREE_PARAMETER = (Fraction(-16, 5), Fraction(-4, 3))


def classify(C, lam) -> ClassificationVerdict:
    """Place (C, lambda) in the integrability landscape.

    integrable-candidate exactly on {(-1,1), (-6,any), (-16,1/16)};
    three-parameter-candidate for C in {-16/5, -4/3} at any lambda;
    logarithmic at C = -2; generic otherwise.
    """
    C, lam = as_scalar(C), as_scalar(lam)
    _require_nonzero_C(C)
    balances = tuple(
        (b, resonances(b, C)) for b in find_dominant_balances(C)
    )
    cf = C.fraction() if C.is_exact else None
    lf = lam.fraction() if lam.is_exact else None
    label, detail = "generic", "resonances leave no single-valued candidate"
    if cf is not None:
        for c_val, lam_val in _INTEGRABLE:
            if cf == c_val and (lam_val is None or lf == lam_val):
                label = "integrable-candidate"
                detail = (f"C={cf} with lambda="
                          f"{'arbitrary' if lam_val is None else lam_val}: "
                          "passes the full test")
                break
        else:
            if cf in _THREE_PARAMETER:
                label = "three-parameter-candidate"
                which = "Case 2, alpha=-3/2" if cf == Fraction(-16, 5) \
                    else "Case 1"
                detail = (f"C={cf} ({which}): single-valued three-parameter "
                          "local solutions exist for any lambda")
            elif cf == Fraction(-2):
                label = "logarithmic"
                detail = ("C=-2: the two singular behaviors coincide and the "
                          "dominant term carries a logarithm")
    return ClassificationVerdict(label=label, detail=detail, balances=balances)


@dataclass(frozen=True)
class CandidateC:
    value: Scalar
    case_tag: str
    note: str


def candidate_C_values() -> list[CandidateC]:
    """The six C values admitting (near-)integer resonance ladders."""
    e = Scalar.exact
    return [
        CandidateC(e(-1), "Case1", "integrable with lambda = 1"),
        CandidateC(e(-4, 3), "Case1", "three-parameter solutions, any lambda"),
        CandidateC(e(-16, 5), "Case2",
                   "alpha = (1 - sqrt(1 - 48/C))/2 = -3/2; three-parameter "
                   "solutions, any lambda"),
        CandidateC(e(-6), "Case2", "integrable for arbitrary lambda"),
        CandidateC(e(-16), "Case2", "integrable with lambda = 1/16"),
        CandidateC(e(-2), "coincident",
                   "two types of singular behaviour coincide; dominant term "
                   "includes a logarithm"),
    ]

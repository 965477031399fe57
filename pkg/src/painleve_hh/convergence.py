"""Convergence certification via the coefficient-bound induction.

If every computed coefficient up to some index N is bounded by M, and for
every k > N the recurrence maps coefficient bounds [0, M]^2 into
themselves, then |a_n|, |b_n| <= M for all n and the series converge on
the punctured disc 0 < |t| <= 1 - eps for any eps > 0.

For C = -16/5 the step bounds read

    |a_k| <= (2*M*(k+1) + |lam| + 2*|c1|) / |k**2 - 4| * M
    |b_k| <= (21*M*k + 26*M + 5) / (5*|k**2 - k - 12|) * M

(the second absorbs the two c1-endpoint terms of the x**2 convolution
under |c1| <= M, which certification therefore also requires).  For
C = -4/3 the same template applied to the step systems gives, with
u = k*(k-1) and D = |(u-2)*(u-12)|,

    |P_k| <= |lam|*M + 2*(k+1)*M**2
    |Q_k| <= M + (7/3)*(k+1)*M**2
    |d_k| <= (|u-8|*|P_k| + 2*sqrt(6)*|Q_k|) / D
    |f_k| <= (|u-6|*|Q_k| + 2*sqrt(6)*|P_k|) / D.

Both bound factors have numerators linear in k over quadratics in k, so
once both are <= 1 at some k above the resonance indices they stay <= 1;
the smallest such k is the induction threshold N.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp

from .errors import ContractViolation, InsufficientPrefix
from .laurent import CASE_C165, CASE_C43, SeriesSolution
from .scalars import Scalar, as_scalar

_RESONANCE_CEILING = 5   # first admissible induction index (above k = 4)


@dataclass(frozen=True)
class ConvergenceCertificate:
    M: Scalar
    N: int
    epsilon: Scalar
    checked_prefix: int
    verdict: str                # "certified" | "not-certified"
    case: str
    audit: dict

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"


def bound_step(k: int, M, lam, c1_abs, case: str):
    """The two step bounds at index k for prefix bound M.

    Returns the classical closed-form pair for C165 and the derived pair
    for C43.  k must avoid the denominator zeros (the
    resonance indices of the respective case).
    """
    M, lam, c1_abs = as_scalar(M), as_scalar(lam), as_scalar(c1_abs)
    lam_abs = lam.magnitude()
    if case == CASE_C165:
        d1 = k * k - 4
        d2 = k * k - k - 12
        if d1 == 0 or d2 == 0:
            raise ContractViolation(f"bound denominators vanish at k={k}")
        b1 = (2 * M * (k + 1) + lam_abs + 2 * c1_abs) / abs(d1) * M
        b2 = (21 * M * k + 26 * M + 5) / (5 * abs(d2)) * M
        return b1, b2
    if case == CASE_C43:
        u = k * (k - 1)
        if u == 2 or u == 12:
            raise ContractViolation(f"bound denominators vanish at k={k}")
        D = Scalar.exact(abs((u - 2) * (u - 12)))
        p = lam_abs * M + 2 * (k + 1) * M * M
        q = M + Scalar.exact(7, 3) * (k + 1) * M * M
        two_sqrt6 = 2 * Scalar.exact(6).sqrt()
        b1 = (abs(u - 8) * p + two_sqrt6 * q) / D
        b2 = (abs(u - 6) * q + two_sqrt6 * p) / D
        return b1, b2
    raise ContractViolation(f"unknown case {case!r}")


def _induction_threshold(M: Scalar, lam: Scalar, c1_abs: Scalar, case: str,
                         k_cap: int = 10 ** 5) -> int | None:
    """A k >= 5 with both bound factors <= 1 for it and beyond (None below cap).

    Numerators are linear and denominators quadratic in k, so the factors
    decrease beyond their first crossing; the scan confirms the crossing
    locally and is exact (the smallest admissible k) while it steps by 1.
    """
    def ok(k: int) -> bool:
        b1, b2 = bound_step(k, M, lam, c1_abs, case)
        return b1.mag() <= M.mag() and b2.mag() <= M.mag()

    k = _RESONANCE_CEILING
    while k <= k_cap:
        if ok(k):
            # the factors are eventually monotone; confirm locally
            if ok(k + 1) and ok(k + 2):
                return k
        k += 1 if k < 4096 else k // 8
    return None


def certify(solution: SeriesSolution, epsilon, m_search_limit=2 ** 20) -> ConvergenceCertificate:
    """Search the smallest power-of-two bound M certifying convergence.

    M must dominate every computed coefficient magnitude from index -1 on
    (and |c1| for C165, which the second bound absorbs under |c1| <= M), and the
    induction threshold must lie inside the computed prefix; otherwise
    InsufficientPrefix reports how many coefficients are needed.
    """
    epsilon = as_scalar(epsilon)
    if solution.trunc_order < 10:
        raise ContractViolation("certification needs a series built with N >= 10")
    if epsilon.mag() <= 0 or epsilon.mag() >= 1:
        raise ContractViolation("epsilon must lie in (0, 1)")
    bits = solution.precision
    case = solution.spec.case
    lam = solution.spec.lam
    xs, ys = solution.recurrence_coefficients()
    prefix_mags = [v.mag() for idx, v in xs.items() if idx >= -1]
    prefix_mags += [v.mag() for idx, v in ys.items() if idx >= -1]
    max_coeff = max(prefix_mags)
    c1_abs = solution.c1.magnitude() if case == CASE_C165 else Scalar.exact(0)
    floor = max_coeff
    if case == CASE_C165:
        floor = max(floor, c1_abs.mag())
    with mp.workprec(bits):
        exponent = max(0, int(mpmath.ceil(mpmath.log(floor, 2)))) if floor > 1 \
            else 0
    limit = as_scalar(m_search_limit).mag()
    audit = {
        "max_prefix_coefficient": Scalar.from_mpc(mpmath.mpc(max_coeff), bits),
        "c1_abs": c1_abs,
        "prefix_bound_indices": "[-1, %d]" % solution.trunc_order,
        "c43_derived_constants": None if case == CASE_C165 else {
            "p_terms": "|lam|*M + 2*(k+1)*M^2",
            "q_terms": "M + (7/3)*(k+1)*M^2",
            "coupling": "2*sqrt(6)",
            "denominator": "|(u-2)*(u-12)|, u = k*(k-1)",
        },
    }
    # Enlarging M past the coefficient floor only raises the induction
    # threshold (the bound factors grow with M), so the first power of two
    # covering the prefix is the only candidate worth checking.
    M = Scalar.exact(2) ** exponent
    if M.mag() > limit:
        return ConvergenceCertificate(
            M=M, N=-1, epsilon=epsilon, checked_prefix=solution.trunc_order,
            verdict="not-certified", case=case,
            audit={**audit, "reason": "required M exceeds the search limit"},
        )
    n_ind = _induction_threshold(M, lam, c1_abs, case)
    if n_ind is None:
        return ConvergenceCertificate(
            M=M, N=-1, epsilon=epsilon, checked_prefix=solution.trunc_order,
            verdict="not-certified", case=case,
            audit={**audit, "reason": "induction threshold beyond scan cap"},
        )
    if n_ind > solution.trunc_order:
        raise InsufficientPrefix(required=n_ind, available=solution.trunc_order)
    audit_entry = {
        **audit,
        "bound_factors_at_N": tuple(
            str(b.mag()) for b in bound_step(n_ind, M, lam, c1_abs, case)),
    }
    return ConvergenceCertificate(
        M=M, N=n_ind, epsilon=epsilon, checked_prefix=solution.trunc_order,
        verdict="certified", case=case, audit=audit_entry,
    )


def geometric_tail_bound(M, epsilon, n: int):
    """M * (1-eps)**n / eps: bound on the tail past n at |t| = 1 - eps."""
    M, epsilon = as_scalar(M), as_scalar(epsilon)
    one_minus = Scalar.exact(1) - epsilon
    return M * one_minus ** n / epsilon

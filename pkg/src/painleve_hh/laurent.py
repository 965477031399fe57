"""Three-parameter Puiseux/Laurent solutions in the two special cases.

Case C = -16/5 ("C165").  With t0 = 0 the ansatz is

    x = sqrt(t) * (c1*t**-2 + sum_{j>=-1} a_j t**j),
    y = -(15/8)*t**-2 + sum_{j>=-1} b_j t**j,

and substituting into the motion equations yields, at each k, the linear
system (writing u = (k-1)*k)

    (k**2 - 4)*a_k + 2*c1*b_k = -lam*a_{k-2} - 2*sum_{j=-1}^{k-1} a_j b_{k-j-2}
    (u - 12)*b_k              = -b_{k-2} - sum_{j=-2}^{k-1} a_j a_{k-j-3}
                                 - (16/5)*sum_{j=-1}^{k-1} b_j b_{k-j-2}

with a_{-2} = c1 and b_{-2} = -15/8.  The determinant vanishes at k = 2
(compatibility fixes c1**4; a_2 is a new free constant) and k = 4 (the
system collapses to one equation; b_4 is free).

Case C = -4/3 ("C43").  The ansatz

    x = s*sqrt(6)*t**-2 + sum d_k t**k,   y = -3*t**-2 + sum f_k t**k

(s = +-1 the x -> -x image) gives

    (u - 6)*d_k + 2*s*sqrt(6)*f_k = -lam*d_{k-2} - 2*sum_{j=-1}^{k-1} d_j f_{k-j-2}
    2*s*sqrt(6)*d_k + (u - 8)*f_k = -f_{k-2} - sum_{j=-1}^{k-1} d_j d_{k-j-2}
                                     - (4/3)*sum_{j=-1}^{k-1} f_j f_{k-j-2}

singular at k = -1 (f_{-1} free), k = 2 (compatibility constrains f_{-1};
f_2 free) and k = 4 (one equation; f_4 free).

Compatibility closed forms:

    c1**4   = 1125*(525 - 1680*lam +- 4*sqrt(35*(2048*lam**2 - 1280*lam + 387)))/167552
    f. -1^2 = (105 - 140*lam +- sqrt(7*(1216*lam**2 - 1824*lam + 783)))/385

A note on the f_{-1} = 0 choice: the product of the two closed-form roots
is proportional to (2*lam - 1)*(lam - 1), so f_{-1} = 0 satisfies the k=2
compatibility only at lam = 1/2 and lam = 1.  The zero branch is still
enumerated (it is the classical even/Weierstrass-type specialization and
merges with a nonzero branch exactly at those lambda); build_series
reports the violation honestly everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import mpmath

from .errors import CompatibilityViolation, ContractViolation
from .linalg import DenseMatrix
from .model import build_henon_heiles, energy_series
from .scalars import Scalar, as_scalar, default_precision, nth_root
from .series import PuiseuxSeries

CASE_C165 = "C165"
CASE_C43 = "C43"

_C_VALUES = {CASE_C165: Fraction(-16, 5), CASE_C43: Fraction(-4, 3)}


def case_C(case: str) -> Scalar:
    """The C parameter value of a named case."""
    if case not in _C_VALUES:
        raise ContractViolation(f"unknown case {case!r}; expected C165 or C43")
    return Scalar.exact(_C_VALUES[case])


@dataclass(frozen=True)
class BranchSpec:
    """One local-solution family: discrete choices plus free parameters.

    root_branch picks the sign inside the c1**4 / f_{-1}**2 closed forms
    ("zero" is the f_{-1} = 0 choice, C43 only).  x_sign = -1 selects the
    x -> -x image (negates every x-coefficient, fixes every
    y-coefficient).  residue_sign picks the sign of f_{-1} itself (C43);
    imaginary_rotation multiplies c1 by i (C165, non-real branch).
    free_params holds (a2, b4) for C165 and (f2, f4) for C43.
    """

    case: str
    lam: Scalar
    root_branch: str
    x_sign: int = 1
    residue_sign: int = 1
    imaginary_rotation: bool = False
    free_params: tuple = (Scalar.exact(0), Scalar.exact(0))
    t0: Scalar = Scalar.exact(0)
    compatible: bool | None = None
    merged_with: str | None = None

    def __post_init__(self):
        if self.case not in _C_VALUES:
            raise ContractViolation(f"unknown case {self.case!r}")
        allowed = ("plus", "minus", "zero") if self.case == CASE_C43 else ("plus", "minus")
        if self.root_branch not in allowed:
            raise ContractViolation(
                f"root_branch {self.root_branch!r} invalid for {self.case}"
            )
        if self.x_sign not in (1, -1) or self.residue_sign not in (1, -1):
            raise ContractViolation("signs must be +1 or -1")
        if self.imaginary_rotation and self.case != CASE_C165:
            raise ContractViolation("imaginary rotation applies to C165 only")

    def label(self) -> str:
        bits = [self.case, self.root_branch]
        bits.append("x+" if self.x_sign > 0 else "x-")
        if self.case == CASE_C43 and self.root_branch != "zero":
            bits.append("res+" if self.residue_sign > 0 else "res-")
        if self.imaginary_rotation:
            bits.append("i")
        return ":".join(bits)


@dataclass(frozen=True)
class RecurrenceStep:
    """Record of one linear step of the recurrence."""

    k: int
    matrix: DenseMatrix
    rhs: tuple
    det: Scalar                  # exact closed-form determinant of the step
    resolution: str              # unique | freed-parameter | compatibility-constrained
    solution: tuple              # (x-coefficient, y-coefficient) adopted at k
    defect: Scalar | None = None
    freed: str | None = None


def recurrence_determinant(case: str, k: int) -> Scalar:
    """Exact determinant of the step matrix at index k."""
    if case == CASE_C165:
        return Scalar.exact((k * k - 4) * ((k - 1) * k - 12))
    if case == CASE_C43:
        u = (k - 1) * k
        return Scalar.exact((u - 2) * (u - 12))
    raise ContractViolation(f"unknown case {case!r}")


def singular_step_indices(case: str, k_min: int = -1, k_max: int = 50) -> list[int]:
    return [k for k in range(k_min, k_max + 1)
            if recurrence_determinant(case, k).is_zero()]


def c1_fourth_power(lam, branch: str, bits: int | None = None) -> Scalar:
    """Closed form for c1**4 in the C = -16/5 compatibility condition.

    The inner radicand 35*(2048*lam**2 - 1280*lam + 387) is positive for
    every real lam (the quadratic's discriminant is negative), which is
    asserted here; the minus branch itself may still be negative, making
    c1 complex.
    """
    lam = as_scalar(lam)
    bits = bits or max(lam.precision, default_precision())
    lam = lam.with_precision(bits)
    if branch not in ("plus", "minus"):
        raise ContractViolation("branch must be plus or minus")
    quad = Scalar.exact(2048, 1, bits) * lam * lam \
        - Scalar.exact(1280, 1, bits) * lam + Scalar.exact(387, 1, bits)
    radicand = Scalar.exact(35, 1, bits) * quad
    if lam.is_real() and radicand.is_real():
        assert radicand.mpc(bits).real > 0, "radicand must be positive for real lam"
    root = nth_root(radicand, 2, 0)
    sign = Scalar.exact(1 if branch == "plus" else -1)
    inner = Scalar.exact(525, 1, bits) - Scalar.exact(1680, 1, bits) * lam \
        + sign * Scalar.exact(4) * root
    return Scalar.exact(1125, 167552, bits) * inner


def f_minus1_squared(lam, branch: str, bits: int | None = None) -> Scalar:
    """Closed form for f_{-1}**2 in the C = -4/3 compatibility condition."""
    lam = as_scalar(lam)
    bits = bits or max(lam.precision, default_precision())
    lam = lam.with_precision(bits)
    if branch == "zero":
        return Scalar.exact(0, 1, bits)
    if branch not in ("plus", "minus"):
        raise ContractViolation("branch must be plus, minus or zero")
    quad = Scalar.exact(1216, 1, bits) * lam * lam \
        - Scalar.exact(1824, 1, bits) * lam + Scalar.exact(783, 1, bits)
    root = nth_root(Scalar.exact(7, 1, bits) * quad, 2, 0)
    sign = Scalar.exact(1 if branch == "plus" else -1)
    return (Scalar.exact(105, 1, bits) - Scalar.exact(140, 1, bits) * lam
            + sign * root) / 385


def leading_x_coefficient(spec: BranchSpec, bits: int | None = None) -> Scalar:
    """c1 (C165) or the +-sqrt(6) leading coefficient (C43)."""
    bits = bits or default_precision()
    sign = Scalar.exact(spec.x_sign)
    if spec.case == CASE_C165:
        c1 = nth_root(c1_fourth_power(spec.lam, spec.root_branch, bits), 4, 0)
        if spec.imaginary_rotation:
            c1 = c1 * Scalar.from_complex(0, 1, bits)
        return sign * c1
    return sign * nth_root(Scalar.exact(6, 1, bits), 2, 0)


def branch_residue(spec: BranchSpec, bits: int | None = None) -> Scalar:
    """Residue of the y-series (coefficient of 1/t)."""
    bits = bits or default_precision()
    if spec.case == CASE_C165:
        c1 = leading_x_coefficient(spec, bits)
        return c1 * c1 / 10
    if spec.root_branch == "zero":
        return Scalar.exact(0, 1, bits)
    w = nth_root(f_minus1_squared(spec.lam, spec.root_branch, bits), 2, 0)
    return Scalar.exact(spec.residue_sign) * w


class _Recurrence:
    """Stateful driver for one branch; holds the coefficient tables."""

    def __init__(self, spec: BranchSpec, bits: int,
                 leading_override: Scalar | None = None,
                 free_override: Scalar | None = None):
        self.spec = spec
        self.bits = bits
        self.lam = spec.lam.with_precision(bits)
        self.case = spec.case
        if self.case == CASE_C165:
            c1 = leading_override if leading_override is not None \
                else leading_x_coefficient(spec, bits)
            self.x = {-2: c1}
            self.y = {-2: Scalar.exact(-15, 8, bits)}
            self.c1 = c1
        else:
            self.x = {-2: leading_x_coefficient(spec, bits)}
            self.y = {-2: Scalar.exact(-3, 1, bits)}
            self.f1_value = free_override if free_override is not None \
                else branch_residue(spec, bits)

    # step-system right-hand sides ---------------------------------------------

    def _rhs(self, k: int):
        x, y, lam = self.x, self.y, self.lam
        zero = Scalar.exact(0)
        if self.case == CASE_C165:
            r1 = -lam * x.get(k - 2, zero)
            for j in range(-1, k):
                r1 = r1 - 2 * x[j] * y[k - j - 2]
            r2 = -y.get(k - 2, zero)
            for j in range(-2, k):
                r2 = r2 - x[j] * x[k - j - 3]
            acc = zero
            for j in range(-1, k):
                acc = acc + y[j] * y[k - j - 2]
            r2 = r2 - Scalar.exact(16, 5) * acc
            return r1, r2
        r1 = -lam * x.get(k - 2, zero)
        for j in range(-1, k):
            r1 = r1 - 2 * x[j] * y[k - j - 2]
        r2 = -y.get(k - 2, zero)
        for j in range(-1, k):
            r2 = r2 - x[j] * x[k - j - 2]
        acc = zero
        for j in range(-1, k):
            acc = acc + y[j] * y[k - j - 2]
        r2 = r2 - Scalar.exact(4, 3) * acc
        return r1, r2

    def _matrix(self, k: int) -> DenseMatrix:
        if self.case == CASE_C165:
            return DenseMatrix.from_rows([
                [Scalar.exact(k * k - 4), 2 * self.c1],
                [Scalar.exact(0), Scalar.exact((k - 1) * k - 12)],
            ])
        u = (k - 1) * k
        off = 2 * self.x[-2]
        return DenseMatrix.from_rows([
            [Scalar.exact(u - 6), off],
            [off, Scalar.exact(u - 8)],
        ])

    def _defect_ok(self, defect: Scalar, r1: Scalar, r2: Scalar) -> bool:
        if defect.is_exact:
            return defect.is_zero()
        scale = 1 + max(r1.mag(), r2.mag())
        return defect.mag() <= mpmath.mpf(2) ** (-(self.bits // 2)) * scale

    def step(self, k: int) -> RecurrenceStep:
        """Solve (or resolve) the step at index k and record it."""
        r1, r2 = self._rhs(k)
        matrix = self._matrix(k)
        det = recurrence_determinant(self.case, k)
        spec = self.spec
        if not det.is_zero():
            # Cramer on the 2x2 step system; exact whenever the inputs are
            a11, a12 = matrix[0, 0], matrix[0, 1]
            a21, a22 = matrix[1, 0], matrix[1, 1]
            d = a11 * a22 - a12 * a21
            xk = (r1 * a22 - r2 * a12) / d
            yk = (a11 * r2 - a21 * r1) / d
            self.x[k], self.y[k] = xk, yk
            return RecurrenceStep(k=k, matrix=matrix, rhs=(r1, r2), det=det,
                                  resolution="unique", solution=(xk, yk))
        if self.case == CASE_C165:
            if k == 2:
                yk = r2 / matrix[1, 1]
                defect = r1 - 2 * self.c1 * yk
                xk = spec.free_params[0]
                resolution, freed = "compatibility-constrained", "a2"
            elif k == 4:
                defect = r2
                yk = spec.free_params[1]
                xk = (r1 - 2 * self.c1 * yk) / matrix[0, 0]
                resolution, freed = "freed-parameter", "b4"
            else:  # pragma: no cover - determinant zeros are exactly {2, 4}
                raise ContractViolation(f"unexpected singular step k={k}")
        else:
            if k == -1:
                # homogeneous singular step: f_{-1} parametrizes the
                # nullspace, with d_{-1} = s*sqrt(6)/2 * f_{-1} slaved
                defect = Scalar.exact(0)
                yk = self.f1_value
                xk = self.x[-2] * yk / 2
                resolution, freed = "freed-parameter", "f-1"
            elif k in (2, 4):
                # left-null vector (-A01, A00) against the rhs
                defect = -matrix[0, 1] * r1 + matrix[0, 0] * r2
                yk = spec.free_params[0 if k == 2 else 1]
                xk = (r1 - matrix[0, 1] * yk) / matrix[0, 0]
                resolution = "compatibility-constrained" if k == 2 \
                    else "freed-parameter"
                freed = "f2" if k == 2 else "f4"
            else:  # pragma: no cover
                raise ContractViolation(f"unexpected singular step k={k}")
        self.x[k], self.y[k] = xk, yk
        return RecurrenceStep(k=k, matrix=matrix, rhs=(r1, r2), det=det,
                              resolution=resolution, solution=(xk, yk),
                              defect=defect, freed=freed)

    def defect_acceptable(self, step: RecurrenceStep) -> bool:
        if step.defect is None:
            return True
        return self._defect_ok(step.defect, *step.rhs)


def step_recurrence(spec: BranchSpec, k: int, prior) -> RecurrenceStep:
    """Single-step entry point: prior is a pair of dicts (x-coeffs, y-coeffs)
    indexed from -2 with every index below k present."""
    bits = max(spec.lam.precision, default_precision())
    eng = _Recurrence(spec, bits)
    eng.x, eng.y = dict(prior[0]), dict(prior[1])
    if spec.case == CASE_C165:
        eng.c1 = eng.x[-2]
    else:
        eng.f1_value = eng.y.get(-1, eng.f1_value)
    for j in range(-2, k):
        if j not in eng.x or j not in eng.y:
            raise ContractViolation(f"prior coefficients missing index {j}")
    step = eng.step(k)
    if step.defect is not None and not eng.defect_acceptable(step):
        raise CompatibilityViolation(k, step.defect)
    return step


@dataclass(frozen=True)
class SeriesSolution:
    """A built branch: the series pair, its energy and the step log."""

    spec: BranchSpec
    x: PuiseuxSeries
    y: PuiseuxSeries
    H: Scalar
    steps: tuple
    trunc_order: int
    precision: int

    def system(self):
        return build_henon_heiles(case_C(self.spec.case), self.spec.lam)

    def recurrence_coefficients(self):
        """(x-coeffs, y-coeffs) keyed by recurrence index, leads included."""
        xs, ys = {}, {}
        if self.spec.case == CASE_C165:
            for i, c in enumerate(self.x.coeffs):
                if i % 2 == 0:
                    xs[i // 2 - 2] = c
        else:
            for i, c in enumerate(self.x.coeffs):
                xs[i - 2] = c
        for i, c in enumerate(self.y.coeffs):
            ys[i - 2] = c
        return xs, ys

    @property
    def c1(self) -> Scalar:
        return self.x.coeffs[0]

    def residue(self) -> Scalar:
        return self.y.coeffs[1]


def build_series(spec: BranchSpec, N: int, precision: int | None = None,
                 on_incompatible: str = "raise") -> SeriesSolution:
    """Run the recurrence through index N and assemble the series pair.

    on_incompatible: "raise" aborts with CompatibilityViolation at an
    inconsistent zero-determinant step; "force" keeps stepping (satisfying
    the solvable row) and leaves the defect visible in the step log and the
    residual.  The energy constant is the t**0 coefficient of the formal
    energy expansion.
    """
    if N < 5:
        raise ContractViolation(f"N must be >= 5 to pass every resonance, got {N}")
    if on_incompatible not in ("raise", "force"):
        raise ContractViolation("on_incompatible must be 'raise' or 'force'")
    bits = precision or max(spec.lam.precision, default_precision())
    eng = _Recurrence(spec, bits)
    steps = []
    for k in range(-1, N + 1):
        step = eng.step(k)
        steps.append(step)
        if step.defect is not None and not eng.defect_acceptable(step):
            if on_incompatible == "raise":
                raise CompatibilityViolation(k, step.defect)
    if spec.case == CASE_C165:
        xcoeffs = []
        for pos in range(2 * (N + 2) + 1):
            if pos % 2 == 0:
                xcoeffs.append(eng.x[pos // 2 - 2])
            else:
                xcoeffs.append(Scalar.exact(0))
        xs = PuiseuxSeries(Fraction(-3, 2), Fraction(1, 2), xcoeffs,
                           center=spec.t0)
    else:
        xs = PuiseuxSeries(-2, 1, [eng.x[k] for k in range(-2, N + 1)],
                           center=spec.t0)
    ys = PuiseuxSeries(-2, 1, [eng.y[k] for k in range(-2, N + 1)],
                       center=spec.t0)
    sys = build_henon_heiles(case_C(spec.case), spec.lam)
    h_series = energy_series(sys, xs, ys)
    h = h_series.coefficient(0)
    if h is None:  # pragma: no cover - N >= 5 always covers exponent 0
        raise ContractViolation("N too small to read the energy constant")
    return SeriesSolution(spec=spec, x=xs, y=ys, H=h, steps=tuple(steps),
                          trunc_order=N, precision=bits)


def compatibility_defect(case: str, lam, free_value, x_sign: int = 1,
                         precision: int | None = None) -> Scalar:
    """k=2 consistency defect as a function of the leading free value.

    For C165 the free value is a trial c1, for C43 a trial f_{-1}.  The
    zeros of this function (in c1**4 resp. f_{-1}**2) are exactly the
    compatibility closed forms, which makes it the numeric elimination
    oracle for them.
    """
    lam = as_scalar(lam)
    bits = precision or max(lam.precision, default_precision())
    probe = BranchSpec(case=case, lam=lam,
                       root_branch="plus" if case == CASE_C165 else "zero",
                       x_sign=x_sign)
    value = as_scalar(free_value).with_precision(bits)
    if case == CASE_C165:
        eng = _Recurrence(probe, bits, leading_override=value)
    else:
        eng = _Recurrence(probe, bits, free_override=value)
    for k in range(-1, 2):
        eng.step(k)
    return eng.step(2).defect


def enumerate_branches(case: str, lam, include_complex: bool = False,
                       dedup: bool = False, free_params=None,
                       t0=None, precision: int | None = None) -> list[BranchSpec]:
    """The nominal local-solution families at (case, lam).

    C165 yields 4 specs ({plus,minus} roots x the x -> -x image); with
    include_complex the four i-rotated c1 branches join.  C43 yields 5
    specs (zero, then {plus,minus} roots x the residue sign).  Each spec's
    ``compatible`` flag records whether its k=2 compatibility actually
    holds at this lambda; dedup=True collapses specs whose series coincide
    (branch merges, e.g. the C43 plus pair onto the zero branch at
    lam = 1), annotating survivors with ``merged_with``.
    """
    lam = as_scalar(lam)
    bits = precision or max(lam.precision, default_precision())
    kwargs = {}
    if free_params is not None:
        kwargs["free_params"] = tuple(as_scalar(v) for v in free_params)
    if t0 is not None:
        kwargs["t0"] = as_scalar(t0)
    specs = []
    if case == CASE_C165:
        for root in ("plus", "minus"):
            for sign in (1, -1):
                specs.append(BranchSpec(case=case, lam=lam, root_branch=root,
                                        x_sign=sign, compatible=True, **kwargs))
        if include_complex:
            for root in ("plus", "minus"):
                for sign in (1, -1):
                    specs.append(BranchSpec(case=case, lam=lam, root_branch=root,
                                            x_sign=sign, imaginary_rotation=True,
                                            compatible=True, **kwargs))
    elif case == CASE_C43:
        ordered = [("zero", 1)] + [(root, rs) for root in ("plus", "minus")
                                   for rs in (1, -1)]
        for root, rs in ordered:
            probe = BranchSpec(case=case, lam=lam, root_branch=root,
                               residue_sign=rs, **kwargs)
            defect = compatibility_defect(
                case, lam, branch_residue(probe, bits), precision=bits)
            ok = defect.is_zero() if defect.is_exact else \
                defect.mag() <= mpmath.mpf(2) ** (-(bits // 2)) * 16
            specs.append(replace(probe, compatible=ok))
    else:
        raise ContractViolation(f"unknown case {case!r}")
    if not dedup:
        return specs
    kept: list[BranchSpec] = []
    tol = mpmath.mpf(2) ** (-(bits // 2)) * 8
    for spec in specs:
        key = (leading_x_coefficient(spec, bits), branch_residue(spec, bits))
        match = None
        for seen in kept:
            seen_key = (leading_x_coefficient(seen, bits),
                        branch_residue(seen, bits))
            if (key[0] - seen_key[0]).mag() <= tol and \
               (key[1] - seen_key[1]).mag() <= tol:
                match = seen
                break
        if match is None:
            kept.append(spec)
        else:
            idx = kept.index(match)
            merged = (match.merged_with + "," if match.merged_with else "") \
                + spec.label()
            kept[idx] = replace(match, merged_with=merged)
    return kept

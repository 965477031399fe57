"""JSON encoding/decoding for every report-facing type.

Scalars serialize as {"num": "...", "den": "..."} decimal strings when
exact and as {"re": "...", "im": "...", "bits": n} otherwise, with enough
digits to round-trip at the stated precision.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
from mpmath import mp

from .convergence import ConvergenceCertificate
from .errors import ContractViolation
from .laurent import BranchSpec, SeriesSolution
from .model import PhaseState, PolynomialODESystem, build_henon_heiles
from .painleve import ClassificationVerdict, DominantBalance, ResonanceSet
from .scalars import Scalar
from .series import PuiseuxSeries
from .subequation import FitResult, QuarticForm, SubequationAnsatz


def _roundtrip_digits(bits: int) -> int:
    return int(math.ceil(bits * math.log10(2))) + 3


def encode_scalar(s: Scalar) -> dict:
    if s.is_exact:
        q = s.fraction()
        return {"num": str(q.numerator), "den": str(q.denominator)}
    bits = s.precision
    digits = _roundtrip_digits(bits)
    v = s.mpc()
    with mp.workprec(bits + 8):
        return {
            "re": mpmath.nstr(v.real, digits, strip_zeros=False),
            "im": mpmath.nstr(v.imag, digits, strip_zeros=False),
            "bits": bits,
        }


def decode_scalar(obj) -> Scalar:
    if not isinstance(obj, dict):
        raise ContractViolation(f"scalar JSON must be an object, got {obj!r}")
    if "num" in obj:
        return Scalar.exact(Fraction(int(obj["num"]), int(obj["den"])))
    bits = int(obj.get("bits", 256))
    return Scalar.from_complex(obj["re"], obj["im"], bits)


def encode_series(s: PuiseuxSeries) -> dict:
    return {
        "step": str(s.step),
        "lead": str(s.lead),
        "center": encode_scalar(s.center),
        "coeffs": [encode_scalar(c) for c in s.coeffs],
        "complete": s.complete,
    }


def decode_series(obj) -> PuiseuxSeries:
    return PuiseuxSeries(
        Fraction(obj["lead"]), Fraction(obj["step"]),
        [decode_scalar(c) for c in obj["coeffs"]],
        center=decode_scalar(obj["center"]) if "center" in obj else None,
        complete=bool(obj.get("complete", False)),
    )


def encode_branch(spec: BranchSpec) -> dict:
    return {
        "case": spec.case,
        "lambda": encode_scalar(spec.lam),
        "root_branch": spec.root_branch,
        "x_sign": spec.x_sign,
        "residue_sign": spec.residue_sign,
        "imaginary_rotation": spec.imaginary_rotation,
        "free_params": [encode_scalar(v) for v in spec.free_params],
        "t0": encode_scalar(spec.t0),
        "compatible": spec.compatible,
        "merged_with": spec.merged_with,
    }


def decode_branch(obj) -> BranchSpec:
    return BranchSpec(
        case=obj["case"],
        lam=decode_scalar(obj["lambda"]),
        root_branch=obj["root_branch"],
        x_sign=int(obj.get("x_sign", 1)),
        residue_sign=int(obj.get("residue_sign", 1)),
        imaginary_rotation=bool(obj.get("imaginary_rotation", False)),
        free_params=tuple(decode_scalar(v) for v in obj.get(
            "free_params", [{"num": "0", "den": "1"}] * 2)),
        t0=decode_scalar(obj["t0"]) if "t0" in obj else Scalar.exact(0),
        compatible=obj.get("compatible"),
        merged_with=obj.get("merged_with"),
    )


def encode_solution(sol: SeriesSolution) -> dict:
    return {
        "step": str(sol.x.step),
        "lead": str(sol.x.lead),
        "case": sol.spec.case,
        "branch": encode_branch(sol.spec),
        "N": sol.trunc_order,
        "H": encode_scalar(sol.H),
        "x": encode_series(sol.x),
        "y": encode_series(sol.y),
        "precision_bits": sol.precision,
        "steps": [
            {
                "k": st.k,
                "det": encode_scalar(st.det),
                "resolution": st.resolution,
                "freed": st.freed,
                "defect": None if st.defect is None else encode_scalar(st.defect),
            }
            for st in sol.steps
        ],
    }


def decode_solution(obj) -> SeriesSolution:
    """Rebuild the series pair of a solution report (step log omitted)."""
    return SeriesSolution(
        spec=decode_branch(obj["branch"]),
        x=decode_series(obj["x"]),
        y=decode_series(obj["y"]),
        H=decode_scalar(obj["H"]),
        steps=(),
        trunc_order=int(obj["N"]),
        precision=int(obj.get("precision_bits", 256)),
    )


def encode_state(s: PhaseState) -> dict:
    return {"x": encode_scalar(s.x), "xt": encode_scalar(s.xt),
            "y": encode_scalar(s.y), "yt": encode_scalar(s.yt),
            "t": encode_scalar(s.t)}


def decode_state(obj) -> PhaseState:
    return PhaseState(*(decode_scalar(obj[k]) for k in ("x", "xt", "y", "yt", "t")))


def encode_model(sys: PolynomialODESystem) -> dict:
    return {"C": encode_scalar(sys.C), "lambda": encode_scalar(sys.lam)}


def decode_model(obj) -> PolynomialODESystem:
    return build_henon_heiles(decode_scalar(obj["C"]), decode_scalar(obj["lambda"]))


def encode_balance(b: DominantBalance) -> dict:
    return {
        "case": b.case_tag,
        "alpha": encode_scalar(b.alpha),
        "beta": encode_scalar(b.beta),
        "a_alpha": "free" if b.a_alpha is None else encode_scalar(b.a_alpha),
        "b_beta": encode_scalar(b.b_beta),
        "sign_choices": dict(b.sign_choices),
        "logarithmic": b.logarithmic,
    }


def encode_resonances(r: ResonanceSet) -> dict:
    return {
        "values": [encode_scalar(v) for v in r.values],
        "all_integer": r.all_integer,
        "has_extra_negative": r.has_extra_negative,
    }


def encode_verdict(v: ClassificationVerdict) -> dict:
    return {
        "label": v.label,
        "detail": v.detail,
        "balances": [
            {"balance": encode_balance(b), "resonances": encode_resonances(r)}
            for b, r in v.balances
        ],
    }


def encode_certificate(c: ConvergenceCertificate) -> dict:
    audit = {}
    for key, val in c.audit.items():
        if isinstance(val, Scalar):
            audit[key] = encode_scalar(val)
        else:
            audit[key] = val
    return {
        "M": encode_scalar(c.M),
        "N": c.N,
        "epsilon": encode_scalar(c.epsilon),
        "checked_prefix": c.checked_prefix,
        "verdict": c.verdict,
        "case": c.case,
        "audit": audit,
    }


def encode_ansatz(a: SubequationAnsatz) -> dict:
    return {"m": a.m,
            "h": {f"{j},{k}": encode_scalar(c)
                  for (j, k), c in a.nonzero().items()}}


def decode_ansatz(obj) -> SubequationAnsatz:
    h = {}
    for key, val in obj["h"].items():
        j, k = (int(p) for p in key.split(","))
        h[(j, k)] = decode_scalar(val)
    return SubequationAnsatz(m=int(obj["m"]), h=h)


def encode_fit_result(r: FitResult) -> dict:
    return {
        "nullspace_dim": r.nullspace_dim,
        "basis": [
            {**encode_ansatz(a), "residual_order": str(o)}
            for a, o in zip(r.basis, r.residual_orders)
        ],
    }


def encode_quartic(q: QuarticForm) -> dict:
    return {name: encode_scalar(getattr(q, name))
            for name in ("A", "G", "B", "E", "C", "P0")}


def decode_quartic(obj) -> QuarticForm:
    return QuarticForm(*(decode_scalar(obj[name])
                         for name in ("A", "G", "B", "E", "C", "P0")))

"""Transitivity certificates from exact linear-algebra criteria.

Rules are tried in a fixed order, cheapest first:

========== ====================================================
Theorem2   ``|det A_h| = 1`` and ``deg(g) >= 2``
Corollary1 ``1 <= deg(h) < deg(g)``
Corollary2 ``A_h^T A_h - deg(g)^2 I`` positive definite
Corollary3 ``A_f`` diagonalizable
Theorem1   left ``lambda_n``-eigenvector of ``A_f`` with ``w_n != 0``
========== ====================================================

All need a volume preserving map over a transitive base.  An Inconclusive
verdict says nothing about non-transitivity.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from . import algebra
from .algebra import matrix as mx
from .algebra import poly
from .errors import DegeneratePointError
from .family import match_theorem3, theorem3_identities
from .model import SkewProductSystem, linear_part, reciprocal_jacobian_sum
from .rational import format_rational


class Volume(str, enum.Enum):
    VERIFIED_EXACT = "VerifiedExact"
    DECLARED = "Declared"
    UNKNOWN = "Unknown"


class BaseStatus(str, enum.Enum):
    PROVED = "Proved"
    DECLARED = "Declared"
    REFUTED = "Refuted"
    UNKNOWN = "Unknown"


RULES = ("Theorem2", "Corollary1", "Corollary2", "Corollary3", "Theorem1")


@dataclass(frozen=True)
class Assumptions:
    volume_preserving: Volume = Volume.UNKNOWN
    base_transitive: BaseStatus = BaseStatus.UNKNOWN
    volume_note: str = ""
    base_note: str = ""


@dataclass(frozen=True)
class VolumeCheck:
    ok: bool
    points: int
    witness: tuple | None = None
    witness_sum: Fraction | None = None
    symbolic: bool = False

    def to_dict(self) -> dict:
        return {
            "passed": self.ok,
            "points": self.points,
            "symbolic": self.symbolic,
            "witness": None if self.witness is None else [format_rational(x) for x in self.witness],
            "witness_sum": None if self.witness_sum is None else format_rational(self.witness_sum),
        }


@dataclass
class Certificate:
    verdict: str
    rule: str
    evidence: dict = field(default_factory=dict)
    assumptions: Assumptions = field(default_factory=Assumptions)
    failures: list = field(default_factory=list)

    @property
    def transitive(self) -> bool:
        return self.verdict == "Transitive"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "rule": self.rule,
            "evidence": jsonable(self.evidence),
            "assumptions": {
                "volume_preserving": self.assumptions.volume_preserving.value,
                "volume_note": self.assumptions.volume_note,
                "base_transitive": self.assumptions.base_transitive.value,
                "base_note": self.assumptions.base_note,
            },
            "failures": [{"rule": r, "reason": why} for r, why in self.failures],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def jsonable(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, dict):
        return {k: jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


# -- base transitivity -------------------------------------------------------

def _finite_order_exponent(dim: int) -> int:
    """lcm of every possible order of a finite-order integer matrix of size dim."""
    exps = [m for m in range(1, 2 * dim * dim + 3) if poly.euler_phi(m) <= dim]
    return lcm(*exps)


def base_transitivity(base) -> BaseStatus:
    """Classical criterion for linear toral endomorphisms.

    A linear map is transitive iff no eigenvalue is a root of unity.  Maps of
    finite order are never transitive; any other case (including a nonzero
    translation) is left Unknown.
    """
    if any(b != 0 for b in base.translation):
        return BaseStatus.UNKNOWN
    a = base.matrix
    if poly.no_root_of_unity_eigenvalue(algebra.char_poly(a)):
        return BaseStatus.PROVED
    if base.degree == 1 and mx.matpow(a, _finite_order_exponent(len(a))) == mx.identity(len(a)):
        return BaseStatus.REFUTED
    return BaseStatus.UNKNOWN


# -- volume preservation -----------------------------------------------------

_PRIMES = [p for p in range(101, 2000) if all(p % d for d in range(2, int(p ** 0.5) + 1))]


def _bad_denominators(sys: SkewProductSystem) -> int:
    den = 1
    for x in (sys.fiber.breakpoints + sys.fiber.lift_values + sys.base.translation
              + (sys.fiber_offset,)):
        den *= x.denominator
    return den * max(sys.base_degree, 1)


def sample_points(sys: SkewProductSystem, count: int, seed: int):
    """Random rational points with prime denominators coprime to the map data."""
    rng = random.Random(seed)
    bad = _bad_denominators(sys)
    primes = [p for p in _PRIMES if gcd(p, bad) == 1]
    while True:
        q = rng.choice(primes)
        yield tuple(Fraction(rng.randrange(q), q) for _ in range(sys.n))


def verify_volume_preservation(sys: SkewProductSystem, sample_count: int = 100,
                               seed: int = 0) -> VolumeCheck:
    """Check that the reciprocal Jacobians over each sampled point's preimages sum to exactly 1.

    Degenerate samples are redrawn.  Members of the explicit family are also
    checked symbolically; ``symbolic`` records that upgrade.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be positive")
    checked = 0
    for q in sample_points(sys, sample_count, seed):
        if checked == sample_count:
            break
        try:
            total = reciprocal_jacobian_sum(sys, q)
        except DegeneratePointError:
            continue
        checked += 1
        if total != 1:
            return VolumeCheck(False, checked, q, total)
    params = match_theorem3(sys)
    symbolic = params is not None and theorem3_identities(params).ok
    return VolumeCheck(True, checked, symbolic=symbolic)


def assumptions_for(sys: SkewProductSystem, volume: str = "verify", base: str = "auto",
                    samples: int = 100, seed: int = 0) -> Assumptions:
    """Populate assumptions: volume in {verify, declare, unknown}, base in {auto, declare}."""
    note = ""
    if volume == "verify":
        check = verify_volume_preservation(sys, samples, seed)
        if check.ok:
            vol = Volume.VERIFIED_EXACT
            note = ("symbolic proof (family identities) and "
                    if check.symbolic else "") + f"verified at {check.points} points"
        else:
            vol = Volume.UNKNOWN
            note = "failed at " + ", ".join(format_rational(x) for x in check.witness)
    elif volume == "declare":
        vol, note = Volume.DECLARED, "declared by user"
    else:
        vol = Volume.UNKNOWN
    if base == "declare":
        status, bnote = BaseStatus.DECLARED, "declared by user"
    else:
        status = base_transitivity(sys.base)
        bnote = "linear criterion (no root-of-unity eigenvalue)" if status == BaseStatus.PROVED else ""
    return Assumptions(vol, status, note, bnote)


# -- rules -------------------------------------------------------------------

def _gram_shift(sys: SkewProductSystem):
    a = sys.base.matrix
    d = sys.fiber_degree
    return mx.sub(mx.matmul(mx.transpose(a), a), mx.identity(len(a), d * d))


def _rule(sys: SkewProductSystem, rule: str):
    """Return ``(fired, evidence, reason)`` for one rule."""
    a_h = sys.base.matrix
    dg, dh = sys.fiber_degree, sys.base_degree
    af = linear_part(sys)
    if rule == "Theorem2":
        ev = {"base_determinant": algebra.determinant(a_h), "fiber_degree": dg}
        if dg < 2:
            return False, ev, f"deg(g) = {dg} < 2"
        if dh == 1:
            return True, ev, ""
        return False, ev, f"deg(h) = {dh} is not 1"
    if rule == "Corollary1":
        ev = {"base_degree": dh, "fiber_degree": dg}
        if 1 <= dh < dg:
            return True, ev, ""
        return False, ev, f"deg(h) = {dh} is not below deg(g) = {dg}"
    if rule == "Corollary2":
        m = _gram_shift(sys)
        minors = mx.leading_principal_minors(m)
        ev = {"gram_minus_degree_squared": m, "leading_minors": minors}
        if dg < 2:
            return False, ev, f"deg(g) = {dg} < 2"
        if all(x > 0 for x in minors):
            return True, ev, ""
        return False, ev, f"A_h^T A_h - {dg * dg} I is not positive definite (minors {list(minors)})"
    if rule == "Corollary3":
        mp = mx.minimal_polynomial(af)
        diag = poly.is_squarefree(mp)
        ev = {"linear_part": af, "minimal_polynomial": poly.to_integer(mp), "diagonalizable": diag}
        if dg < 2:
            return False, ev, f"deg(g) = {dg} < 2"
        if diag:
            return True, ev, ""
        return False, ev, f"A_f = {[list(r) for r in af]} is not diagonalizable"
    if rule == "Theorem1":
        w = algebra.transverse_invariant_hyperplane(af, sys.fiber_eigenvalue)
        ev = {"linear_part": af, "eigenvalue": sys.fiber_eigenvalue, "witness": w}
        if dg < 2:
            return False, ev, f"deg(g) = {dg} < 2"
        if w is not None:
            return True, ev, ""
        return False, ev, "no left eigenvector with nonzero last coordinate"
    raise ValueError(rule)


def certify(sys: SkewProductSystem, assumptions: Assumptions) -> Certificate:
    missing = []
    if assumptions.volume_preserving == Volume.UNKNOWN:
        missing.append(("prerequisite", "volume preservation not established"))
    if assumptions.base_transitive not in (BaseStatus.PROVED, BaseStatus.DECLARED):
        missing.append(("prerequisite",
                        f"base transitivity is {assumptions.base_transitive.value}"))
    if missing:
        return Certificate("Inconclusive", "None", {"linear_part": linear_part(sys)},
                           assumptions, missing)
    failures = []
    diagnostics: dict = {}
    for rule in RULES:
        fired, ev, reason = _rule(sys, rule)
        if fired:
            return Certificate("Transitive", rule, ev, assumptions, [])
        failures.append((rule, reason))
        diagnostics[rule] = ev
    return Certificate("Inconclusive", "None", diagnostics, assumptions, failures)


def verify_evidence(cert: Certificate) -> bool:
    """Re-run the exact check named by ``cert.rule`` on its evidence alone."""
    ev = cert.evidence
    if cert.rule == "Theorem2":
        return abs(ev["base_determinant"]) == 1 and ev["fiber_degree"] >= 2
    if cert.rule == "Corollary1":
        return 1 <= ev["base_degree"] < ev["fiber_degree"]
    if cert.rule == "Corollary2":
        return algebra.positive_definite(ev["gram_minus_degree_squared"])
    if cert.rule == "Corollary3":
        return algebra.is_diagonalizable(ev["linear_part"])
    if cert.rule == "Theorem1":
        w = ev["witness"]
        return (w is not None and w[-1] != 0
                and mx.vecmat(w, ev["linear_part"]) == tuple(ev["eigenvalue"] * x for x in w))
    return not cert.transitive

"""Arithmetic elimination of design parameters.

Everything here is exact integer (or ``Fraction``) arithmetic.  Divisor
formulas and elimination cases are read from the JSON files in
``flagdesigns/data``; their expressions are evaluated by a small restricted
evaluator over Python syntax (no ``eval``).
"""

from __future__ import annotations

import ast
import json
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import gcd, prod
from pathlib import Path
from typing import Any, Iterable, Mapping

from sympy import divisors

from .ff import FieldError, prime_power
from .geom import gauss_binom

__all__ = [
    "ExpressionError",
    "SubdegreeVanishes",
    "Expr",
    "SubdegreeRule",
    "SieveCase",
    "EliminationReport",
    "p_part",
    "feasible_params",
    "params_for_r",
    "check_cor39",
    "check_cor310",
    "coprime_lemma_filter",
    "subdegree_value",
    "eliminate",
    "parabolic_index",
    "lemma313_margin",
    "load_rules",
    "load_cases",
    "CASE_FILES",
    "wreath_replay",
]

Params = tuple[int, int, int, int, int]


class ExpressionError(ValueError):
    pass


class SubdegreeVanishes(ValueError):
    """The divisor formula evaluates to 0: that suborbit is absent for these values."""


# -- restricted expression evaluation ------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
}
_CMPOPS = {
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
    ast.Lt: operator.lt,
    ast.LtE: operator.le,
    ast.Gt: operator.gt,
    ast.GtE: operator.ge,
}


def _odd_part(n: int) -> int:
    while n and n % 2 == 0:
        n //= 2
    return n


_FUNCS = {"gcd": gcd, "odd_part": _odd_part}


class Expr:
    """A parsed arithmetic/boolean expression over named integer parameters."""

    def __init__(self, text: str):
        self.text = text
        try:
            self._tree = ast.parse(text, mode="eval").body
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
        self.names = frozenset(self._check(self._tree))

    def _check(self, node: ast.AST) -> set[str]:
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, int) or isinstance(node.value, bool):
                raise ExpressionError(f"only integer literals allowed in {self.text!r}")
            return set()
        if isinstance(node, ast.Name):
            return {node.id}
        if isinstance(node, ast.BinOp):
            if type(node.op) not in _BINOPS and not isinstance(node.op, ast.Pow):
                raise ExpressionError(f"operator {type(node.op).__name__} not allowed")
            return self._check(node.left) | self._check(node.right)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd, ast.Not)):
            return self._check(node.operand)
        if isinstance(node, ast.BoolOp):
            return set().union(*(self._check(v) for v in node.values))
        if isinstance(node, ast.Compare):
            if any(type(op) not in _CMPOPS for op in node.ops):
                raise ExpressionError(f"comparison not allowed in {self.text!r}")
            out = self._check(node.left)
            for c in node.comparators:
                out |= self._check(c)
            return out
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS or node.keywords:
                raise ExpressionError(f"call not allowed in {self.text!r}")
            return set().union(*(self._check(a) for a in node.args))
        raise ExpressionError(f"{type(node).__name__} not allowed in {self.text!r}")

    def __call__(self, bindings: Mapping[str, int]) -> Any:
        missing = self.names - set(bindings)
        if missing:
            raise ExpressionError(f"{self.text!r} needs values for {sorted(missing)}")
        return self._eval(self._tree, bindings)

    def _eval(self, node: ast.AST, env: Mapping[str, int]) -> Any:
        if isinstance(node, ast.Constant):
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            return Fraction(env[node.id])
        if isinstance(node, ast.BinOp):
            left, right = self._eval(node.left, env), self._eval(node.right, env)
            if isinstance(node.op, ast.Pow):
                if right.denominator != 1:
                    raise ExpressionError(f"non-integer exponent in {self.text!r}")
                return left ** int(right)
            if isinstance(node.op, (ast.FloorDiv, ast.Mod)) and (
                left.denominator != 1 or right.denominator != 1
            ):
                raise ExpressionError(f"// and % need integers in {self.text!r}")
            if isinstance(node.op, (ast.Div, ast.FloorDiv, ast.Mod)) and right == 0:
                raise ExpressionError(f"division by zero in {self.text!r}")
            return _BINOPS[type(node.op)](left, right)
        if isinstance(node, ast.UnaryOp):
            val = self._eval(node.operand, env)
            if isinstance(node.op, ast.Not):
                return not val
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.BoolOp):
            vals = (self._eval(v, env) for v in node.values)
            return all(vals) if isinstance(node.op, ast.And) else any(vals)
        if isinstance(node, ast.Compare):
            left = self._eval(node.left, env)
            for op, comp in zip(node.ops, node.comparators):
                right = self._eval(comp, env)
                if not _CMPOPS[type(op)](left, right):
                    return False
                left = right
            return True
        assert isinstance(node, ast.Call)
        args = [self._eval(a, env) for a in node.args]
        if any(a.denominator != 1 for a in args):
            raise ExpressionError(f"{node.func.id} needs integers in {self.text!r}")
        return Fraction(_FUNCS[node.func.id](*(int(a) for a in args)))

    def integer(self, bindings: Mapping[str, int]) -> int:
        val = self(bindings)
        if isinstance(val, bool) or val.denominator != 1:
            raise ExpressionError(f"{self.text!r} = {val} is not an integer at {dict(bindings)}")
        return int(val)

    def truth(self, bindings: Mapping[str, int]) -> bool:
        return bool(self(bindings))

    def __repr__(self) -> str:
        return f"Expr({self.text!r})"


# -- elementary number theory --------------------------------------------------------


def _require_prime(p: int) -> None:
    try:
        if prime_power(p)[1] == 1:
            return
    except FieldError:
        pass
    raise ValueError(f"{p} is not prime")


def p_part(n: int, p: int) -> int:
    """Largest power of the prime ``p`` dividing ``n``."""
    if n < 1:
        raise ValueError("n must be positive")
    _require_prime(p)
    out = 1
    while n % p == 0:
        n //= p
        out *= p
    return out


def _p_prime_part(n: int, p: int) -> int:
    return n // p_part(n, p)


def check_cor39(order_G: int, order_H: int) -> bool:
    """Flag-transitivity forces |G| <= |G_alpha|^3."""
    return order_G <= order_H**3


def check_cor310(order_X: int, order_H0: int, out_order: int, p: int) -> bool:
    """|X| < |Out|_{p'}^2 |H0| |H0|_{p'}^2, the bound for non-parabolic point stabilizers."""
    rhs = _p_prime_part(out_order, p) ** 2 * order_H0 * _p_prime_part(order_H0, p) ** 2
    return order_X < rhs


def coprime_lemma_filter(order_H0: int, out_order: int, p: int) -> bool:
    """Whether |H0|_p < |Out(X)|."""
    return p_part(order_H0, p) < out_order


# -- parameter enumeration -------------------------------------------------------------


def params_for_r(v: int, r: int, lam_min: int = 1, lam_max: int | None = None) -> list[Params]:
    """Every (v, b, r, k, lam) with this exact ``r`` passing the counting conditions.

    Conditions: k = 1 + lam(v-1)/r and b = vr/k integral, 2 < k < v - 1,
    k <= r and lam*v < r^2.  Ordered by increasing lam.
    """
    out = []
    lam = max(lam_min, 1)
    while lam * v < r * r and (lam_max is None or lam <= lam_max):
        num = lam * (v - 1)
        if num % r == 0:
            k = 1 + num // r
            if 2 < k < v - 1 and k <= r and (v * r) % k == 0:
                out.append((v, v * r // k, r, k, lam))
        lam += 1
    return out


def feasible_params(
    v: int,
    r_divisor_targets: Iterable[int],
    lam_max: int | None = None,
    require_coprime: bool = True,
    lam_min: int = 1,
) -> list[Params]:
    """Parameter tuples on ``v`` points whose ``r`` divides every target.

    With ``require_coprime`` (the default) only gcd(r, lam) = 1 survives, and
    then r must also divide v - 1.  Without it, r | v - 1 is not imposed
    (it only follows from coprimality); integrality of k does the filtering.
    Output is sorted by r descending, then lam ascending.
    """
    if v < 4:
        raise ValueError("v must be at least 4")
    targets = list(r_divisor_targets)
    if any(t < 1 for t in targets):
        raise ValueError("divisor targets must be positive")
    g = 0
    for t in targets:
        g = gcd(g, t)
    if require_coprime:
        g = gcd(g, v - 1)
    if g == 0:
        g = v - 1
    out = []
    for r in reversed(divisors(g)):
        for tup in params_for_r(v, r, lam_min, lam_max):
            if not require_coprime or gcd(r, tup[4]) == 1:
                out.append(tup)
    return out


def parabolic_index(family: str, n: int, q: int, i: int) -> int:
    """Index of the stabilizer of a (totally singular) i-space.

    ``family`` is ``"PSL"`` (n-dimensional space, 1 <= i <= n-1) or ``"PSp"``
    (n = 2m, 1 <= i <= m).
    """
    fam = family.lower()
    if fam in ("psl", "sl", "l"):
        if not 1 <= i <= n - 1:
            raise ValueError(f"i must be in 1..{n - 1}")
        return gauss_binom(n, i, q)
    if fam in ("psp", "sp", "s"):
        if n % 2 or not 1 <= i <= n // 2:
            raise ValueError(f"need n even and 1 <= i <= {n // 2}")
        num = prod(q ** (n - 2 * j) - 1 for j in range(i))
        den = prod(q**j - 1 for j in range(1, i + 1))
        return num // den
    raise ValueError(f"unknown family {family!r}")


def lemma313_margin(n: int, q: int) -> tuple[tuple[int, int], tuple[int, int] | None]:
    """``((lhs_a, rhs_a), (lhs_b, rhs_b))`` for the two product bounds.

    (a) prod_{i=1..n} (q^(2i) - 1) < q^(n(n+1));
    (b) prod_{i=2..n} (q^i - 1) < q^((n^2+n-2)/2), only for n >= 2 (else None).
    """
    if q < 2 or n < 1:
        raise ValueError("need q >= 2 and n >= 1")
    a = (prod(q ** (2 * i) - 1 for i in range(1, n + 1)), q ** (n * (n + 1)))
    b = None
    if n >= 2:
        b = (prod(q**i - 1 for i in range(2, n + 1)), q ** ((n * n + n - 2) // 2))
    return a, b


# -- subdegree divisor rules --------------------------------------------------------------


@dataclass(frozen=True)
class SubdegreeRule:
    """One divisor formula ``d`` for the subdegrees of a classical group action."""

    row: int
    aschbacher_class: str
    socle: str
    stabilizer: str
    d: str
    condition: str
    params: tuple[str, ...]
    note: str = ""

    def __post_init__(self):
        names = Expr(self.d).names | Expr(self.condition).names
        extra = names - set(self.params)
        if extra:
            raise ExpressionError(f"row {self.row}: undeclared symbols {sorted(extra)}")

    @classmethod
    def from_dict(cls, rec: Mapping[str, Any]) -> "SubdegreeRule":
        return cls(
            int(rec["row"]),
            rec["class"],
            rec["socle"],
            rec["stabilizer"],
            rec["d"],
            rec["condition"],
            tuple(rec["params"]),
            rec.get("note", ""),
        )


def subdegree_value(rule: SubdegreeRule, bindings: Mapping[str, int]) -> int:
    """Exact value of ``rule.d``; raises if the condition fails or d is not a positive integer."""
    missing = set(rule.params) - set(bindings)
    if missing:
        raise ExpressionError(f"row {rule.row}: bind {sorted(missing)}")
    if not Expr(rule.condition).truth(bindings):
        raise ValueError(f"row {rule.row}: condition {rule.condition!r} fails at {dict(bindings)}")
    val = Expr(rule.d).integer(bindings)
    if val == 0:
        raise SubdegreeVanishes(f"row {rule.row}: d = 0 at {dict(bindings)}")
    if val < 0:
        raise ExpressionError(f"row {rule.row}: d = {val} is negative at {dict(bindings)}")
    return val


# -- elimination cases ------------------------------------------------------------------------


@dataclass(frozen=True)
class SieveCase:
    """A lower bound ``l_v`` for v and an upper bound ``u_r`` for r.

    ``v`` is the exact number of points when known.  ``r_multiple_of`` records
    a forced divisor of r for cases with no useful upper bound.
    """

    description: str
    l_v: int
    u_r: int | None = None
    lam_min: int = 2
    v: int | None = None
    r_multiple_of: int | None = None

    def __post_init__(self):
        if self.l_v < 1:
            raise ValueError("l_v must be >= 1")
        if self.u_r is not None and self.u_r < 1:
            raise ValueError("u_r must be >= 1")
        if self.u_r is None and self.r_multiple_of is None:
            raise ValueError("need u_r or r_multiple_of")
        if self.v is not None and self.v < self.l_v:
            raise ValueError("v is below its lower bound")

    def to_dict(self) -> dict[str, Any]:
        return {
            "description": self.description,
            "l_v": self.l_v,
            "u_r": self.u_r,
            "lambda_min": self.lam_min,
            "v": self.v,
            "r_multiple_of": self.r_multiple_of,
        }


@dataclass(frozen=True)
class EliminationReport:
    """``verdict`` is "eliminated", "survivors" (non-empty list) or "open"
    (bound inconclusive and no exact v to enumerate over)."""

    case: SieveCase
    verdict: str
    survivors: tuple[Params, ...] = ()
    reasons: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict[str, Any]:
        return {
            "case": self.case.to_dict(),
            "verdict": self.verdict,
            "survivors": [list(t) for t in self.survivors],
            "reasons": list(self.reasons),
        }


def eliminate(case: SieveCase) -> EliminationReport:
    lam = case.lam_min
    if case.u_r is not None and lam * case.l_v > case.u_r**2:
        why = f"lambda*v >= {lam}*{case.l_v} = {lam * case.l_v} > u_r^2 = {case.u_r**2} >= r^2"
        return EliminationReport(case, "eliminated", (), (why,))
    if case.v is None:
        why = f"{lam}*l_v = {lam * case.l_v} <= u_r^2 = {case.u_r**2} and v is unknown"
        return EliminationReport(case, "open", (), (why,))
    v = case.v
    if v < 4:
        return EliminationReport(case, "eliminated", (), (f"v = {v} < 4 admits no nontrivial design",))
    reasons = []
    m = case.r_multiple_of
    if m is not None and (v - 1) % m:
        why = f"r is a multiple of {m} and divides v - 1 = {v - 1}, but {m} does not divide {v - 1}"
        return EliminationReport(case, "eliminated", (), (why,))
    found = []
    for r in reversed(divisors(v - 1)):
        if (case.u_r is not None and r > case.u_r) or (m is not None and r % m):
            continue
        found.extend(t for t in params_for_r(v, r, lam) if gcd(r, t[4]) == 1)
    if not found:
        reasons.append(f"no (r, lambda) with lambda >= {lam} passes the counting conditions for v = {v}")
        return EliminationReport(case, "eliminated", (), tuple(reasons))
    reasons.append(f"{len(found)} parameter tuples pass the counting conditions")
    return EliminationReport(case, "survivors", tuple(found), tuple(reasons))


# -- data files -----------------------------------------------------------------------------

# name -> shipped file; the keys are what the CLI accepts
CASE_FILES = {
    "psl-parabolic": "cases_psl_parabolic.json",
    "psl-small": "cases_psl_small.json",
    "psp-small": "cases_psp_small.json",
    "orthogonal-small": "cases_orthogonal_small.json",
}
RULES_FILE = "subdegree_divisors.json"


def _read_json(name_or_path: str | Path) -> Any:
    p = Path(name_or_path)
    if p.exists():
        return json.loads(p.read_text())
    return json.loads(resources.files("flagdesigns.data").joinpath(str(name_or_path)).read_text())


@lru_cache(maxsize=None)
def _shipped_rules() -> tuple[SubdegreeRule, ...]:
    return tuple(SubdegreeRule.from_dict(r) for r in _read_json(RULES_FILE)["rules"])


def load_rules(path: str | Path | None = None) -> tuple[SubdegreeRule, ...]:
    if path is None:
        return _shipped_rules()
    return tuple(SubdegreeRule.from_dict(r) for r in _read_json(path)["rules"])


def _prime_powers(lo: int, hi: int) -> list[int]:
    out = []
    for q in range(max(lo, 2), hi + 1):
        try:
            prime_power(q)
        except FieldError:
            continue
        out.append(q)
    return out


def _instances(rec: Mapping[str, Any]) -> list[dict[str, int]]:
    if "q_values" in rec:
        qs = list(rec["q_values"])
    elif "q_range" in rec:
        qs = _prime_powers(*rec["q_range"])
    else:
        return [{}]
    cond = Expr(rec.get("condition", "1"))
    out = []
    for q in qs:
        p, a = prime_power(q)
        env = {"q": q, "p": p, "a": a}
        if cond.truth(env):
            out.append(env)
    return out


def _case_from_record(rec: Mapping[str, Any], env: Mapping[str, int]) -> SieveCase:
    l_v = Expr(str(rec["l_v"])).integer(env)
    u_r = None if rec.get("u_r") is None else Expr(str(rec["u_r"])).integer(env)
    mult = None if rec.get("r_multiple_of") is None else Expr(str(rec["r_multiple_of"])).integer(env)
    label = f"{rec['class']} {rec['socle']} / {rec['stabilizer']} (row {rec['row']})"
    if env:
        label += " at q=" + str(env["q"])
    return SieveCase(
        label,
        l_v,
        u_r,
        int(rec.get("lambda_min", 2)),
        l_v if rec.get("v_exact") else None,
        mult,
    )


def load_cases(name_or_path: str | Path) -> list[SieveCase]:
    """Expand a case file into concrete cases (symbolic rows once per listed q)."""
    fname = CASE_FILES.get(str(name_or_path), name_or_path)
    data = _read_json(fname)
    cases = []
    for rec in data["cases"]:
        for env in _instances(rec):
            cases.append(_case_from_record(rec, env))
    return cases


# -- the PSp4(q) wreath-product replay -----------------------------------------------------


def wreath_replay(
    qs: Iterable[int] = (3, 4, 5, 7, 8), s: int = 1, lam_min: int = 2, lam_max: int = 17
) -> dict[str, list[Params]]:
    """Tuples for v = q^2(q^2+1)/2 with r = 3(q^2-1)/s exactly, lam in [lam_min, lam_max].

    Returns ``{"all": [...], "coprime": [...]}``; "coprime" keeps gcd(r, lam) = 1.
    """
    every: list[Params] = []
    for q in qs:
        prime_power(q)
        v = q * q * (q * q + 1) // 2
        num = 3 * (q * q - 1)
        if num % s:
            continue
        every.extend(params_for_r(v, num // s, lam_min, lam_max))
    return {"all": every, "coprime": [t for t in every if gcd(t[2], t[4]) == 1]}

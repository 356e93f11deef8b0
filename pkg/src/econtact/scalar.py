"""Exact symbolic scalars for frame calculus.

Expressions are sympy trees restricted to a small grammar: rational
constants, real parameter symbols, coordinate variables, sums, products,
integer powers, ``exp`` and abstract C-infinity functions of a single
affine argument in the coordinate variables (with formal derivatives,
printed ``q'``, ``q''``, ...).  Everything stays exact; floats are
rejected.  Canonical form is ``cancel(expand(e))``, which is unique for
this grammar and idempotent.
"""

from __future__ import annotations

import keyword
import random
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

import sympy as sp
from sympy.core.function import AppliedUndef, UndefinedFunction
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

ScalarExpr = sp.Expr
Rat = Union[int, Fraction, sp.Rational]


class ScalarError(ValueError):
    """Malformed expression, unbound symbol or bad evaluation."""


class InconsistentAssumptions(ScalarError):
    """The declared parameter constraints admit no rational point."""


# ---------------------------------------------------------------------------
# symbols and abstract function heads

_PARAMS: dict[str, sp.Symbol] = {}
_COORDS: dict[str, sp.Symbol] = {}
_FN_HEADS: dict[tuple[str, int], UndefinedFunction] = {}


def parameter(name: str) -> sp.Symbol:
    """A named real parameter (shared symbol instance per name)."""
    if name not in _PARAMS:
        _PARAMS[name] = sp.Symbol(name, real=True)
    return _PARAMS[name]


def coordinate(name: str) -> sp.Symbol:
    """A named coordinate variable (distinct namespace from parameters)."""
    if name in _PARAMS:
        raise ScalarError(f"name {name!r} already used as a parameter")
    if name not in _COORDS:
        _COORDS[name] = sp.Symbol(name, real=True)
    return _COORDS[name]


def function_head(base: str, order: int = 0) -> UndefinedFunction:
    """Abstract function head; ``order`` counts formal derivatives.

    Heads are cached so that sympy structural equality holds, and carry an
    ``fdiff`` that bumps the derivative order, which keeps sympy's chain
    rule inside the grammar (no Subs/Derivative nodes survive).
    """
    key = (base, order)
    if key not in _FN_HEADS:
        head = UndefinedFunction(base + "'" * order)

        def fdiff(self, argindex=1, _b=base, _o=order):
            return function_head(_b, _o + 1)(*self.args)

        head.fdiff = fdiff
        head._econtact_base = base
        head._econtact_order = order
        _FN_HEADS[key] = head
    return _FN_HEADS[key]


def fn_base_order(head) -> tuple[str, int]:
    base = getattr(head, "_econtact_base", None)
    if base is None:
        raise ScalarError(f"unregistered function head {head}")
    return base, head._econtact_order


# ---------------------------------------------------------------------------
# canonical form

def simplify(e: ScalarExpr) -> ScalarExpr:
    """Canonical form: expand, then cancel to a reduced p/q. Idempotent."""
    e = sp.sympify(e)
    return sp.cancel(sp.expand(e))


def is_canonical_zero(e: ScalarExpr) -> bool:
    return simplify(e) == 0


def differentiate(e: ScalarExpr, v: sp.Symbol) -> ScalarExpr:
    """Formal partial derivative with respect to a coordinate variable."""
    if v.name not in _COORDS:
        raise ScalarError(f"{v} is not a coordinate variable")
    return simplify(sp.diff(sp.sympify(e), v))


# ---------------------------------------------------------------------------
# assumptions

@dataclass(frozen=True)
class Range:
    """Closed/open rational interval constraint; None bound = unbounded."""

    lo: Optional[sp.Rational] = None
    hi: Optional[sp.Rational] = None
    lo_open: bool = False
    hi_open: bool = False

    def admits(self, v: sp.Rational) -> bool:
        if self.lo is not None and (v < self.lo or (self.lo_open and v == self.lo)):
            return False
        if self.hi is not None and (v > self.hi or (self.hi_open and v == self.hi)):
            return False
        return True

    def intersect(self, other: "Range") -> "Range":
        lo, lo_open = self.lo, self.lo_open
        if other.lo is not None and (lo is None or other.lo > lo
                                     or (other.lo == lo and other.lo_open)):
            lo, lo_open = other.lo, other.lo_open
        hi, hi_open = self.hi, self.hi_open
        if other.hi is not None and (hi is None or other.hi < hi
                                     or (other.hi == hi and other.hi_open)):
            hi, hi_open = other.hi, other.hi_open
        return Range(lo, hi, lo_open, hi_open)


@dataclass
class ParamFacts:
    nonzero: bool = False
    positive: bool = False
    range: Optional[Range] = None          # constraint on the parameter
    square_range: Optional[Range] = None   # constraint on its square

    def admits(self, v: sp.Rational) -> bool:
        if self.nonzero and v == 0:
            return False
        if self.positive and v <= 0:
            return False
        if self.range is not None and not self.range.admits(v):
            return False
        if self.square_range is not None and not self.square_range.admits(v * v):
            return False
        return True

    def combine(self, other: "ParamFacts") -> "ParamFacts":
        def both(a, b):
            if a is None:
                return b
            return a if b is None else a.intersect(b)
        return ParamFacts(self.nonzero or other.nonzero,
                          self.positive or other.positive,
                          both(self.range, other.range),
                          both(self.square_range, other.square_range))


@dataclass
class FuncFacts:
    nowhere_zero: bool = False


# candidate pool, ordered so boundary-revealing values come first
_BASE_POOL = [sp.Integer(0), sp.Integer(1), sp.Integer(-1), sp.Integer(2),
              sp.Integer(-2), sp.Rational(1, 2), sp.Rational(-1, 2),
              sp.Integer(3), sp.Rational(3, 4), sp.Rational(-3, 4),
              sp.Rational(1, 4), sp.Rational(4, 3), sp.Rational(-4, 3),
              sp.Rational(3, 2), sp.Rational(-3, 2), sp.Integer(5),
              sp.Rational(2, 5), sp.Rational(5, 2), sp.Rational(-5, 3),
              sp.Rational(7, 4)]


@dataclass
class Assumptions:
    """Per-parameter and per-abstract-function facts.

    Every parameter referenced by an expression must have an entry; use
    :meth:`ensure` to add unconstrained ones.  Consistency means every
    entry admits at least one rational value from the probe pool.
    """

    params: dict[sp.Symbol, ParamFacts] = field(default_factory=dict)
    funcs: dict[str, FuncFacts] = field(default_factory=dict)

    def ensure(self, symbols: Iterable[sp.Symbol]) -> "Assumptions":
        for s in symbols:
            self.params.setdefault(s, ParamFacts())
        return self

    def merged(self, other: "Assumptions") -> "Assumptions":
        out = Assumptions(dict(self.params), dict(self.funcs))
        for sym, facts in other.params.items():
            out.params[sym] = (out.params[sym].combine(facts)
                               if sym in out.params else facts)
        for name, facts in other.funcs.items():
            if name in out.funcs:
                facts = FuncFacts(out.funcs[name].nowhere_zero or facts.nowhere_zero)
            out.funcs[name] = facts
        return out

    def candidates(self, sym: sp.Symbol) -> list[sp.Rational]:
        facts = self.params.get(sym, ParamFacts())
        pool = [v for v in _BASE_POOL if facts.admits(v)]
        # closed rational endpoints are boundary cases worth probing
        for rng, squared in ((facts.range, False), (facts.square_range, True)):
            if rng is None:
                continue
            for b, is_open in ((rng.lo, rng.lo_open), (rng.hi, rng.hi_open)):
                if b is None or is_open:
                    continue
                roots = [b] if not squared else [r for r in (sp.sqrt(b), -sp.sqrt(b))
                                                 if r.is_Rational]
                for r in roots:
                    if facts.admits(r) and r not in pool:
                        pool.insert(0, r)
        return pool

    def check_consistent(self) -> None:
        for sym in self.params:
            if not self.candidates(sym):
                raise InconsistentAssumptions(
                    f"no admissible rational value for parameter {sym}")


# ---------------------------------------------------------------------------
# rational evaluation

def _instantiate_functions(e: ScalarExpr, polys: Mapping[str, ScalarExpr],
                           var: sp.Symbol) -> ScalarExpr:
    """Replace abstract-function applications by explicit polynomials."""
    subs = {}
    for app in e.atoms(AppliedUndef):
        base, order = fn_base_order(app.func)
        if base not in polys:
            raise ScalarError(f"abstract function {base!r} not bound")
        body = sp.sympify(polys[base])
        body = sp.diff(body, var, order) if order else body
        subs[app] = body.subs(var, app.args[0])
    return e.subs(subs, simultaneous=True)


def eval_rational(e: ScalarExpr, bindings: Mapping, *,
                  funcs: Optional[Mapping[str, ScalarExpr]] = None,
                  func_var: Optional[sp.Symbol] = None) -> sp.Rational:
    """Exact rational value of ``e`` under a complete binding.

    ``bindings`` maps symbols to rationals; ``funcs`` maps abstract
    function base names to explicit polynomials in ``func_var``.
    ``exp(u)`` evaluates only when u evaluates to 0.
    """
    e = sp.sympify(e)
    if funcs:
        e = _instantiate_functions(e, funcs, func_var if func_var is not None
                                   else sp.Symbol("_s"))
    elif e.atoms(AppliedUndef):
        raise ScalarError("expression has abstract functions but no bindings for them")
    sym_subs = {s: sp.Rational(v) for s, v in bindings.items()}
    missing = e.free_symbols - set(sym_subs)
    if missing:
        raise ScalarError(f"unbound symbols: {sorted(missing, key=str)}")
    e = e.subs(sym_subs, simultaneous=True)
    for node in e.atoms(sp.exp):
        arg = sp.nsimplify(node.args[0])
        if arg != 0:
            raise ScalarError(f"exp({arg}) is not rational")
    e = sp.cancel(e)
    if not e.is_Rational:
        if e.has(sp.zoo) or e.has(sp.nan) or e.has(sp.oo):
            raise ScalarError("division by zero during evaluation")
        raise ScalarError(f"evaluation did not produce a rational: {e}")
    return e


# ---------------------------------------------------------------------------
# tri-state zero testing

class Verdict(Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    UNKNOWN = "unknown"


@dataclass
class ZeroResult:
    verdict: Verdict
    witness: Optional[dict] = None   # binding where the value is nonzero
    value: Optional[sp.Rational] = None

    def __bool__(self) -> bool:  # truthy iff definitely zero
        return self.verdict is Verdict.ZERO


_N_PROBES = 32


def _seeded_poly(rng: random.Random, var: sp.Symbol, nowhere_zero: bool) -> ScalarExpr:
    """Random rational polynomial of degree <= 4 (sign-definite if required)."""
    def coeff():
        return sp.Rational(rng.randint(-4, 4), rng.randint(1, 3))
    if nowhere_zero:
        # square of a quadratic plus a positive constant, optionally negated:
        # any nowhere-zero continuous function on R has constant sign
        quad = coeff() * var**2 + coeff() * var + coeff()
        body = sp.expand(quad * quad + sp.Rational(rng.randint(1, 4), rng.randint(1, 3)))
        return -body if rng.random() < 0.5 else body
    return sp.expand(sum(coeff() * var**k for k in range(5)))


def probe_bindings(e: ScalarExpr, assumptions: Assumptions, seed: int,
                   count: int = _N_PROBES):
    """Deterministic admissible probe bindings for the symbols of ``e``.

    Yields ``(symbol_binding, func_polys, func_var)`` triples.  The first
    bindings sweep boundary-first candidate values per parameter; later
    ones are seeded random picks.  exp nodes are replaced upstream.
    """
    e = sp.sympify(e)
    syms = sorted(e.free_symbols, key=lambda s: s.name)
    fn_bases = sorted({fn_base_order(a.func)[0] for a in e.atoms(AppliedUndef)})
    assumptions.ensure(syms)
    assumptions.check_consistent()
    pools = {s: assumptions.candidates(s) for s in syms}
    rng = random.Random(seed)
    var = sp.Symbol("_s")
    # unconstrained functions get boundary instantiations first (the zero
    # polynomial is an admissible profile and must be probed)
    fn_boundary = [sp.S.Zero, sp.S.One, var]
    for i in range(count):
        binding = {}
        for s in syms:
            pool = pools[s]
            binding[s] = pool[i % len(pool)] if i < len(pool) else rng.choice(pool)
        polys = {}
        for b in fn_bases:
            nz = assumptions.funcs.get(b, FuncFacts()).nowhere_zero
            if not nz and i < len(fn_boundary):
                polys[b] = fn_boundary[i]
            else:
                polys[b] = _seeded_poly(rng, var, nz)
        yield binding, polys, var


def _exp_opaque(e: ScalarExpr, assumptions: Assumptions) -> ScalarExpr:
    """Treat each distinct exp argument as an opaque positive parameter."""
    e = sp.sympify(e)
    subs = {}
    for i, node in enumerate(sorted(e.atoms(sp.exp), key=sp.default_sort_key)):
        s = sp.Symbol(f"_exp{i}", real=True, positive=True)
        assumptions.params[s] = ParamFacts(positive=True)
        subs[node] = s
    return e.subs(subs, simultaneous=True)


def is_zero(e: ScalarExpr, assumptions: Optional[Assumptions] = None,
            seed: int = 0) -> ZeroResult:
    """Tri-state zero test.

    ZERO iff the canonical form is the zero node.  Otherwise the value is
    probed at up to 32 seeded admissible bindings (boundary candidates
    first, abstract functions instantiated as random degree<=4
    polynomials): NONZERO if some probe is nonzero and none vanishes,
    UNKNOWN if probes disagree or all vanish.  An expression that is zero
    at an admissible boundary but not inside therefore surfaces as
    UNKNOWN rather than as a definite verdict.
    """
    assumptions = assumptions if assumptions is not None else Assumptions()
    e = simplify(e)
    if e == 0:
        return ZeroResult(Verdict.ZERO)
    e = _exp_opaque(e, assumptions)
    witness = None
    value = None
    saw_zero = False
    for binding, polys, var in probe_bindings(e, assumptions, seed):
        try:
            v = eval_rational(e, binding, funcs=polys, func_var=var)
        except ScalarError:
            continue  # inadmissible probe (e.g. pole); try another
        if v == 0:
            saw_zero = True
        elif witness is None:
            witness = {str(k): v_ for k, v_ in binding.items()}
            if polys:
                witness.update({b: str(p) for b, p in polys.items()})
            value = v
        if witness is not None and saw_zero:
            break
    if witness is not None and not saw_zero:
        return ZeroResult(Verdict.NONZERO, witness, value)
    return ZeroResult(Verdict.UNKNOWN, witness, value)


# ---------------------------------------------------------------------------
# parsing of expression literals

_TOKEN_OK = re.compile(r"^[0-9A-Za-z_+\-*/^() '.,]*$")
_PRIME_CALL = re.compile(r"([A-Za-z_]\w*)('+)(?=\()")

_TRANSFORMS = standard_transformations + (convert_xor,)
# names the standard transformations emit into the evaluated source
_PARSE_GLOBALS = {"Integer": sp.Integer, "Rational": sp.Rational,
                  "Float": sp.Float, "Symbol": sp.Symbol}


def parse_scalar(text: str, *, params: Iterable[str] = (),
                 coords: Iterable[str] = (), funcs: Iterable[str] = ()) -> ScalarExpr:
    """Parse an expression literal (infix, ``^`` powers, ``exp``, ``q'(u)``)."""
    if not _TOKEN_OK.match(text):
        bad = next(ch for ch in text if not _TOKEN_OK.match(ch))
        raise ScalarError(f"illegal character {bad!r} in expression {text!r}")
    local: dict[str, object] = {"exp": sp.exp}
    src = text

    def bind(name: str, obj) -> None:
        # python keywords (e.g. "lambda") cannot survive the eval-based
        # parser; route them through an alias token
        if keyword.iskeyword(name):
            alias = f"_kw_{name}"
            nonlocal src
            src = re.sub(rf"\b{re.escape(name)}\b", alias, src)
            local[alias] = obj
        else:
            local[name] = obj

    for p in params:
        bind(p, parameter(p))
    for c in coords:
        bind(c, coordinate(c))
    for f in funcs:
        bind(f, function_head(f))

    def prime_repl(m: re.Match) -> str:
        base, primes = m.group(1), len(m.group(2))
        key = f"_prime{primes}_{base}"
        local[key] = function_head(base, primes)
        return key

    src = _PRIME_CALL.sub(prime_repl, src)
    try:
        e = parse_expr(src, local_dict=local, global_dict=dict(_PARSE_GLOBALS),
                       transformations=_TRANSFORMS, evaluate=True)
    except (SyntaxError, NameError, TypeError, ValueError, AttributeError,
            sp.SympifyError) as exc:
        raise ScalarError(f"cannot parse expression {text!r}: {exc}") from exc
    validate_grammar(e, params=set(params), coords=set(coords), funcs=set(funcs))
    return e


def validate_grammar(e: ScalarExpr, *, params: set[str], coords: set[str],
                     funcs: set[str]) -> None:
    """Reject nodes outside the supported grammar and undeclared names."""
    e = sp.sympify(e)
    for node in sp.preorder_traversal(e):
        if isinstance(node, sp.Float):
            raise ScalarError(f"float literal {node} is not exact; use a fraction")
        if isinstance(node, AppliedUndef):
            base, _ = fn_base_order(node.func)
            if base not in funcs:
                raise ScalarError(f"undeclared function {base!r}")
            if len(node.args) != 1:
                raise ScalarError(f"{base} must take exactly one argument")
            _check_affine(node.args[0], coords)
        elif isinstance(node, sp.Pow):
            if not node.exp.is_Integer:
                raise ScalarError(f"non-integer power {node}")
        elif isinstance(node, sp.Symbol):
            if node.name not in params and node.name not in coords:
                raise ScalarError(f"undeclared symbol {node.name!r}")
        elif not isinstance(node, (sp.Add, sp.Mul, sp.Rational, sp.Integer,
                                   sp.exp)) and node.func is not sp.exp:
            raise ScalarError(f"unsupported node {type(node).__name__} in {e}")


def _check_affine(u: ScalarExpr, coords: set[str]) -> None:
    poly = sp.expand(u)
    syms = poly.free_symbols
    if not all(s.name in coords for s in syms):
        raise ScalarError(f"function argument {u} must use coordinate variables only")
    if syms and sp.degree(sp.Poly(poly, *sorted(syms, key=str))) > 1:
        raise ScalarError(f"function argument {u} must be affine")


def random_expr(rng: random.Random, *, params: list[sp.Symbol],
                coords: list[sp.Symbol], funcs: list[str], depth: int = 4,
                allow_exp: bool = True) -> ScalarExpr:
    """Seeded random expression tree within the grammar (for tests)."""
    if depth == 0 or rng.random() < 0.25:
        leaves = [sp.Rational(rng.randint(-5, 5), rng.randint(1, 4))]
        leaves += params + coords
        return rng.choice(leaves)
    kind = rng.choice(["add", "mul", "pow", "exp", "fn"])
    sub = lambda: random_expr(rng, params=params, coords=coords, funcs=funcs,
                              depth=depth - 1, allow_exp=allow_exp)
    if kind == "add":
        return sp.Add(sub(), sub())
    if kind == "mul":
        return sp.Mul(sub(), sub())
    if kind == "pow":
        return sp.Pow(sub(), rng.randint(1, 3))
    if kind == "exp" and allow_exp and coords:
        return sp.exp(rng.choice(coords))
    if kind == "fn" and funcs and coords:
        u = sum(sp.Integer(rng.randint(-2, 2)) * c for c in coords) + rng.randint(-2, 2)
        return function_head(rng.choice(funcs), rng.randint(0, 2))(u)
    return sub()

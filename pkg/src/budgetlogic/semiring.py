"""Cost algebras for priced proofs and budget games.

A cost algebra here is a commutative semiring (carrier, plus, times, bot,
top) that is absorptive (a plus (a times b) = a) and invertible: whenever
b lies below a in the derived order, the equation ``a times x = b`` has a
least solution, written ``div(b, a)``.  The derived order is
``a <= b iff a plus b = b``; bot is the worst cost (and best budget), top
the best cost (and worst budget).

Four instances ship with the library:

    cost           <Q+ u {inf}, min, +,   inf, 0>    accumulated expense
    max            <Q+ u {inf}, min, max, inf, 0>    peak resource usage
    security       <{pub,conf}, or,  and, pub, conf> clearance levels
    probabilistic  <[0,1],      max, *,   0,   1>    independent events

Numeric carriers are exact rationals (decimal literals are parsed as
rationals); floats are rejected so that label equality is always exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction


class SemiringError(ValueError):
    pass


class UndefinedDivision(SemiringError):
    """div(b, a) requested although the budget b does not cover a."""


class _Infinity:
    """Completion point of the nonnegative rationals."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

PUBLIC = "pub"
CONFIDENTIAL = "conf"


def _as_exact(x):
    """Coerce ints/strings to Fraction, pass INF through, reject floats."""
    if x is INF:
        return INF
    if isinstance(x, bool):
        raise SemiringError(f"not a numeric cost: {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise SemiringError(f"not an exact numeric cost: {x!r}")


def render_numeric(v) -> str:
    """Render an exact value: integer, exact decimal, or n/d."""
    if v is INF:
        return "inf"
    if v.denominator == 1:
        return str(v.numerator)
    d = v.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d == 1:
        digits = max(twos, fives)
        scaled = v.numerator * 10**digits // v.denominator
        s = str(scaled).rjust(digits + 1, "0")
        return s[:-digits] + "." + s[-digits:]
    return f"{v.numerator}/{v.denominator}"


class CostSemiring:
    """Descriptor of one cost algebra; immutable, safe to share.

    Subclasses supply the raw operations; the derived order, fold helpers
    and sort keys are defined once here.
    """

    name = "?"
    totally_ordered = True
    bot = None
    top = None

    def plus(self, x, y):
        raise NotImplementedError

    def times(self, x, y):
        raise NotImplementedError

    def glb(self, x, y):
        raise NotImplementedError

    def div(self, b, a):
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def sample(self, rng: random.Random):
        raise NotImplementedError

    def parse_value(self, text: str):
        raise NotImplementedError

    def render_value(self, v) -> str:
        raise NotImplementedError

    def sort_key(self, v):
        """Key such that ascending sort lists values best-first."""
        raise NotImplementedError

    # derived

    def leq(self, x, y) -> bool:
        """x lies below y in the derived order (x is the worse cost)."""
        return self.plus(x, y) == y

    def check(self, x):
        if not self.contains(x):
            raise SemiringError(f"{self.render_value_safe(x)} is not in the {self.name} carrier")
        return x

    def render_value_safe(self, v) -> str:
        try:
            return self.render_value(v)
        except Exception:
            return repr(v)

    def fold_times(self, values):
        acc = self.top
        for v in values:
            acc = self.times(acc, v)
        return acc

    def best(self, values):
        """The greatest element of a nonempty iterable (the best cost)."""
        it = iter(values)
        acc = next(it)
        for v in it:
            acc = self.plus(acc, v)
        return acc

    def __repr__(self):
        return f"<semiring {self.name}>"


class _NumericMixin:
    """Shared pieces of the two <Q+ u inf, min, _, inf, 0> instances."""

    bot = INF
    top = Fraction(0)

    def plus(self, x, y):
        if x is INF:
            return y
        if y is INF:
            return x
        return x if x <= y else y

    def contains(self, x) -> bool:
        return x is INF or (isinstance(x, Fraction) and x >= 0)

    def sample(self, rng: random.Random):
        if rng.random() < 0.1:
            return INF
        return Fraction(rng.randrange(0, 41), rng.randrange(1, 9))

    def parse_value(self, text: str):
        text = text.strip()
        if text == "inf":
            return INF
        try:
            v = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise SemiringError(f"bad {self.name} label {text!r}") from exc
        if v < 0:
            raise SemiringError(f"{self.name} labels are nonnegative, got {text!r}")
        return v

    def render_value(self, v) -> str:
        return render_numeric(v)

    def sort_key(self, v):
        return (1, Fraction(0)) if v is INF else (0, v)


class CostAlgebra(_NumericMixin, CostSemiring):
    """Accumulated expenses: plus is numeric min, times is numeric +."""

    name = "cost"

    def times(self, x, y):
        if x is INF or y is INF:
            return INF
        return x + y

    def glb(self, x, y):
        if x is INF or y is INF:
            return INF
        return x if x >= y else y

    def div(self, b, a):
        if not self.leq(b, a):
            raise UndefinedDivision(f"budget {render_numeric(b)} does not cover {render_numeric(a)}")
        if b is INF:
            return INF
        return b - a


class MaxAlgebra(_NumericMixin, CostSemiring):
    """Peak resource usage: times is numeric max (idempotent)."""

    name = "max"

    def times(self, x, y):
        if x is INF or y is INF:
            return INF
        return x if x >= y else y

    glb = times

    def div(self, b, a):
        if not self.leq(b, a):
            raise UndefinedDivision(f"budget {render_numeric(b)} does not cover {render_numeric(a)}")
        return b


class SecurityAlgebra(CostSemiring):
    """Two clearance levels; combining stays confidential only when both are."""

    name = "security"
    bot = PUBLIC
    top = CONFIDENTIAL

    def plus(self, x, y):
        return PUBLIC if (x == PUBLIC and y == PUBLIC) else CONFIDENTIAL

    def times(self, x, y):
        return CONFIDENTIAL if (x == CONFIDENTIAL and y == CONFIDENTIAL) else PUBLIC

    glb = times

    def div(self, b, a):
        if not self.leq(b, a):
            raise UndefinedDivision(f"budget {b} does not cover {a}")
        return b

    def contains(self, x) -> bool:
        return x in (PUBLIC, CONFIDENTIAL)

    def sample(self, rng: random.Random):
        return rng.choice((PUBLIC, CONFIDENTIAL))

    def parse_value(self, text: str):
        text = text.strip()
        if text not in (PUBLIC, CONFIDENTIAL):
            raise SemiringError(f"security labels are pub or conf, got {text!r}")
        return text

    def render_value(self, v) -> str:
        return v

    def sort_key(self, v):
        return 0 if v == CONFIDENTIAL else 1


class ProbabilisticAlgebra(CostSemiring):
    """Chained independent events: plus is max, times the product."""

    name = "probabilistic"
    bot = Fraction(0)
    top = Fraction(1)

    def plus(self, x, y):
        return x if x >= y else y

    def times(self, x, y):
        return x * y

    def glb(self, x, y):
        return x if x <= y else y

    def div(self, b, a):
        if not self.leq(b, a):
            raise UndefinedDivision(f"budget {render_numeric(b)} does not cover {render_numeric(a)}")
        if a == 0:
            return Fraction(0)
        return b / a

    def contains(self, x) -> bool:
        return isinstance(x, Fraction) and 0 <= x <= 1

    def sample(self, rng: random.Random):
        d = rng.randrange(1, 13)
        return Fraction(rng.randrange(0, d + 1), d)

    def parse_value(self, text: str):
        text = text.strip()
        try:
            v = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise SemiringError(f"bad probabilistic label {text!r}") from exc
        if not 0 <= v <= 1:
            raise SemiringError(f"probabilistic labels lie in [0,1], got {text!r}")
        return v

    def render_value(self, v) -> str:
        return render_numeric(v)

    def sort_key(self, v):
        return -v


_BUILTINS = {
    "cost": CostAlgebra(),
    "max": MaxAlgebra(),
    "security": SecurityAlgebra(),
    "probabilistic": ProbabilisticAlgebra(),
}
_BUILTINS["prob"] = _BUILTINS["probabilistic"]


def builtin(name: str) -> CostSemiring:
    try:
        return _BUILTINS[name]
    except KeyError:
        raise SemiringError(
            f"unknown semiring {name!r}; known: cost, security, max, prob"
        ) from None


@dataclass
class AxiomReport:
    """Outcome of sampling the semiring laws on one instance."""

    semiring: str
    samples: int
    checked: dict = field(default_factory=dict)   # law -> number of assertions
    failures: list = field(default_factory=list)  # (law, witness string)

    @property
    def ok(self) -> bool:
        return not self.failures

    def failed_laws(self):
        return sorted({law for law, _ in self.failures})

    def summary(self) -> str:
        lines = [f"semiring {self.semiring}: {self.samples} samples"]
        for law in sorted(self.checked):
            bad = [w for l, w in self.failures if l == law]
            if bad:
                lines.append(f"  {law}: FAIL ({bad[0]})")
            else:
                lines.append(f"  {law}: pass ({self.checked[law]} checks)")
        return "\n".join(lines)


def check_axioms(k: CostSemiring, samples: int, seed: int = 0) -> AxiomReport:
    """Sample triples and assert the semiring laws plus the derived ones.

    Failures land in the report (first witness per law is enough to debug);
    nothing is raised.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = random.Random(seed)
    rep = AxiomReport(semiring=k.name, samples=samples)

    def law(name, holds, witness):
        rep.checked[name] = rep.checked.get(name, 0) + 1
        if not holds:
            rep.failures.append((name, witness))

    r = k.render_value_safe
    law("S1", k.contains(k.bot) and k.contains(k.top), "bot/top not in carrier")
    for _ in range(samples):
        a, b, c = k.sample(rng), k.sample(rng), k.sample(rng)
        w = f"a={r(a)} b={r(b)} c={r(c)}"
        law("S1", k.contains(k.plus(a, b)) and k.contains(k.times(a, b)), w)
        law("S2", k.plus(a, b) == k.plus(b, a)
            and k.plus(k.plus(a, b), c) == k.plus(a, k.plus(b, c))
            and k.plus(a, k.bot) == a, w)
        law("S2", k.times(a, b) == k.times(b, a)
            and k.times(k.times(a, b), c) == k.times(a, k.times(b, c))
            and k.times(a, k.top) == a, w)
        law("S3", k.times(a, k.plus(b, c)) == k.plus(k.times(a, b), k.times(a, c)), w)
        law("S4", k.times(a, k.bot) == k.bot, w)
        law("S5", k.plus(a, k.times(a, b)) == a, w)
        law("plus-idempotent", k.plus(a, a) == a, w)
        law("times-lower", k.leq(k.times(a, b), a) and k.leq(k.times(a, b), b), w)
        g = k.glb(a, b)
        law("glb-lower", k.leq(g, a) and k.leq(g, b), w)
        if k.leq(c, a) and k.leq(c, b):
            law("glb-greatest", k.leq(c, g), w)
        if k.leq(b, a):
            try:
                q = k.div(b, a)
            except UndefinedDivision:
                law("div-roundtrip", False, w + " (div undefined)")
            else:
                law("div-roundtrip", k.times(a, q) == b, w)
                if k.times(a, c) == b:
                    law("div-minimal", k.leq(q, c), w + f" x={r(c)}")
        else:
            try:
                k.div(b, a)
            except UndefinedDivision:
                law("div-domain", True, w)
            else:
                law("div-domain", False, w)
    return rep

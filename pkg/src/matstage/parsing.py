"""Quantity and chemical-formula parsing.

Temperatures normalise to kelvin, pressures to gigapascal. Formulas go
through a two-stage parse: a strict stoichiometry grammar first, then a
relaxed retry that strips phase prefixes, trailing annotations and hyphens.
Formulas whose counts contain doping variables (x, y, z, delta, d) come back
``unresolved`` with the variable set; anything the grammar cannot handle at
all comes back ``parse_error``. Everything here is a pure function.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import ValidationError


class Unit(str, Enum):
    KELVIN = "kelvin"
    GIGAPASCAL = "gigapascal"


@dataclass(frozen=True)
class Quantity:
    magnitude: float
    unit: Unit


class QuantityParseError(ValidationError):
    """Raised when a raw value string cannot be turned into a Quantity."""

    def __init__(self, raw: str, reason: str):
        super().__init__(f"cannot parse {raw!r}: {reason}")
        self.raw = raw
        self.reason = reason


_NUMBER = r"[+-]?(?:\d+(?:\.\d+)?|\.\d+)(?:[eE][+-]?\d+)?"
_NUMBER_RE = re.compile(_NUMBER)

# unit token -> factor applied as: kelvin = magnitude * scale + offset
_TEMPERATURE_UNITS = {
    "K": (1.0, 0.0),
    "mK": (0.001, 0.0),
    "°C": (1.0, 273.15),
}
# unit token -> scale to gigapascal
_PRESSURE_UNITS = {
    "GPa": 1.0,
    "kbar": 0.1,
    "MPa": 0.001,
}


def _parse_quantity(raw: str, units: dict, default_unit: str) -> tuple[float, str]:
    text = raw.strip()
    if not text:
        raise QuantityParseError(raw, "empty")
    numbers = _NUMBER_RE.findall(text)
    if not numbers:
        raise QuantityParseError(raw, "no numeric value")
    if len(numbers) > 1:
        raise QuantityParseError(raw, "multiple numeric values")
    unit_alternatives = "|".join(re.escape(u) for u in units)
    m = re.fullmatch(rf"({_NUMBER})\s*({unit_alternatives})?", text)
    if not m:
        raise QuantityParseError(raw, "invalid characters")
    return float(m.group(1)), m.group(2) or default_unit


def parse_temperature(raw: str) -> Quantity:
    """Parse a critical-temperature string into kelvin.

    Accepts an optional sign, a decimal number and an optional unit among
    K, mK and degrees Celsius; bare numbers default to kelvin. Negative
    values parse fine; deciding they are anomalous is the anomaly module's
    job.
    """
    value, unit = _parse_quantity(raw, _TEMPERATURE_UNITS, "K")
    scale, offset = _TEMPERATURE_UNITS[unit]
    return Quantity(value * scale + offset, Unit.KELVIN)


def parse_pressure(raw: str) -> Quantity:
    """Parse an applied-pressure string into gigapascal (GPa, kbar, MPa)."""
    value, unit = _parse_quantity(raw, _PRESSURE_UNITS, "GPa")
    return Quantity(value * _PRESSURE_UNITS[unit], Unit.GIGAPASCAL)


def format_temperature(q: Quantity) -> str:
    return f"{q.magnitude!r} K"


def format_pressure(q: Quantity) -> str:
    return f"{q.magnitude!r} GPa"


def try_parse_temperature(raw: Optional[str]) -> Optional[float]:
    """Kelvin magnitude, or None when absent or unparseable."""
    if raw is None:
        return None
    try:
        return parse_temperature(raw).magnitude
    except QuantityParseError:
        return None


def try_parse_pressure(raw: Optional[str]) -> Optional[float]:
    if raw is None:
        return None
    try:
        return parse_pressure(raw).magnitude
    except QuantityParseError:
        return None


# --- formula normalisation -------------------------------------------------

_CHAR_MAP = str.maketrans(
    {
        # subscript and superscript digits
        "₀": "0", "₁": "1", "₂": "2", "₃": "3", "₄": "4",
        "₅": "5", "₆": "6", "₇": "7", "₈": "8", "₉": "9",
        "⁰": "0", "¹": "1", "²": "2", "³": "3", "⁴": "4",
        "⁵": "5", "⁶": "6", "⁷": "7", "⁸": "8", "⁹": "9",
        # dash family to ASCII hyphen-minus
        "−": "-", "–": "-", "—": "-", "‐": "-", "‑": "-",
    }
)

_TRAILING_PUNCT = ".,;:!?"


def normalize_formula(raw: str) -> str:
    """Canonicalise a raw formula string; idempotent and total.

    Maps unicode sub/superscript digits and dashes to ASCII, collapses
    internal whitespace and drops surrounding whitespace plus trailing
    punctuation.
    """
    text = raw.translate(_CHAR_MAP)
    text = re.sub(r"\s+", " ", text.strip())
    return text.rstrip(_TRAILING_PUNCT + " ")


# --- composition parsing ----------------------------------------------------

ELEMENTS = frozenset(
    """H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co
    Ni Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te
    I Xe Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir
    Pt Au Hg Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No
    Lr Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og""".split()
)

#: Doping placeholders accepted in count position.
VARIABLE_TOKENS = frozenset({"x", "y", "z", "δ", "d"})


class CompositionOutcome(str, Enum):
    RESOLVED = "resolved"
    UNRESOLVED = "unresolved"
    PARSE_ERROR = "parse_error"


@dataclass(frozen=True)
class Composition:
    outcome: CompositionOutcome
    elements: dict[str, float] = field(default_factory=dict)
    variables: frozenset[str] = frozenset()
    reason: str = ""

    def to_json(self) -> dict:
        if self.outcome == CompositionOutcome.RESOLVED:
            details = {"elements": dict(sorted(self.elements.items()))}
        elif self.outcome == CompositionOutcome.UNRESOLVED:
            details = {"variables": sorted(self.variables)}
        else:
            details = {"reason": self.reason}
        return {"outcome": self.outcome.value, **details}


class _FormulaSyntaxError(Exception):
    pass


class _FormulaParser:
    """Recursive-descent parser for the strict stoichiometry grammar.

    Formula  := Item+
    Item     := Element Count? | '(' Formula ')' Count?
    Count    := Term (('+'|'-') Term)*
    Term     := Number | Variable | Number Variable
    Elements follow maximal munch (two-letter symbols tried first), counts
    default to 1 and nested group counts multiply through. Any Variable in
    a count makes the whole composition symbolic.
    """

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.variables: set[str] = set()

    def parse(self) -> tuple[dict[str, float], set[str]]:
        totals = self._formula(depth=0)
        self._skip_ws()
        if self.pos != len(self.text):
            raise _FormulaSyntaxError(
                f"unexpected character {self.text[self.pos]!r} at {self.pos}"
            )
        if not totals and not self.variables:
            raise _FormulaSyntaxError("empty formula")
        return totals, self.variables

    def _formula(self, depth: int) -> dict[str, float]:
        totals: dict[str, float] = {}
        saw_item = False
        while True:
            self._skip_ws()
            if self.pos >= len(self.text):
                break
            ch = self.text[self.pos]
            if ch == "(":
                self.pos += 1
                inner = self._formula(depth + 1)
                self._skip_ws()
                if self.pos >= len(self.text) or self.text[self.pos] != ")":
                    raise _FormulaSyntaxError("unbalanced parenthesis")
                self.pos += 1
                count = self._count()
                for sym, coeff in inner.items():
                    totals[sym] = totals.get(sym, 0.0) + coeff * count
                saw_item = True
            elif ch == ")":
                if depth == 0:
                    raise _FormulaSyntaxError("unbalanced parenthesis")
                break
            else:
                sym = self._element()
                count = self._count()
                totals[sym] = totals.get(sym, 0.0) + count
                saw_item = True
        if not saw_item:
            raise _FormulaSyntaxError("expected an element or group")
        return totals

    def _element(self) -> str:
        two = self.text[self.pos : self.pos + 2]
        if len(two) == 2 and two[0].isupper() and two[1].islower() and two in ELEMENTS:
            self.pos += 2
            return two
        one = self.text[self.pos : self.pos + 1]
        if one in ELEMENTS:
            self.pos += 1
            return one
        raise _FormulaSyntaxError(f"unknown element symbol at {self.pos}")

    def _count(self) -> float:
        # Missing count means 1. A count containing variables contributes
        # nothing numeric; callers see the variables set instead.
        if not self._at_count_start():
            return 1.0
        value, symbolic = self._term()
        while self.pos < len(self.text) and self.text[self.pos] in "+-":
            op = self.text[self.pos]
            self.pos += 1
            if not self._at_count_start():
                raise _FormulaSyntaxError(f"dangling {op!r} in count expression")
            rhs, rhs_symbolic = self._term()
            symbolic = symbolic or rhs_symbolic
            value = value + rhs if op == "+" else value - rhs
        if symbolic:
            return 0.0
        if value <= 0:
            raise _FormulaSyntaxError("counts must be positive")
        return value

    def _at_count_start(self) -> bool:
        # Variable letters are lowercase and element symbols start uppercase,
        # so a variable in count position is unambiguous.
        if self.pos >= len(self.text):
            return False
        ch = self.text[self.pos]
        return ch.isdigit() or ch == "." or ch in VARIABLE_TOKENS

    def _term(self) -> tuple[float, bool]:
        ch = self.text[self.pos]
        if ch in VARIABLE_TOKENS:
            self.variables.add(ch)
            self.pos += 1
            return 0.0, True
        m = _NUMBER_RE.match(self.text, self.pos)
        if not m or m.group(0)[0] in "+-":
            raise _FormulaSyntaxError(f"expected a count at {self.pos}")
        self.pos = m.end()
        number = float(m.group(0))
        # implicit multiplication, e.g. "2x"
        if self.pos < len(self.text) and self.text[self.pos] in VARIABLE_TOKENS:
            self.variables.add(self.text[self.pos])
            self.pos += 1
            return 0.0, True
        return number, False

    def _skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] == " ":
            self.pos += 1


_PHASE_PREFIX_RE = re.compile(
    r"^(?:[αβγδεκλ]|[htcomrs]|1T|2H|3R|4H|6R)[-\s]"
)


def _relaxed_candidates(text: str) -> list[str]:
    """Rewrites attempted, in order, after the strict parse fails."""
    stripped = _PHASE_PREFIX_RE.sub("", text)
    attempts = [stripped]
    if " " in stripped:
        attempts.append(stripped.split(" ", 1)[0])
    for base in (text, stripped):
        attempts.append(base.replace("-", ""))
        if " " in base:
            attempts.append(base.split(" ", 1)[0].replace("-", ""))
    out: list[str] = []
    seen = {text}
    for candidate in attempts:
        candidate = candidate.strip()
        if candidate and candidate not in seen:
            seen.add(candidate)
            out.append(candidate)
    return out


def parse_composition(raw: str) -> Composition:
    """Resolve a formula into an element->coefficient map.

    Never raises; failure comes back as outcome parse_error with a reason.
    """
    text = normalize_formula(raw)
    if not text:
        return Composition(CompositionOutcome.PARSE_ERROR, reason="empty formula")

    first_error: Optional[str] = None
    for candidate in (text, *_relaxed_candidates(text)):
        try:
            elements, variables = _FormulaParser(candidate).parse()
        except _FormulaSyntaxError as exc:
            if first_error is None:
                first_error = str(exc)
            continue
        if variables:
            return Composition(
                CompositionOutcome.UNRESOLVED, variables=frozenset(variables)
            )
        return Composition(CompositionOutcome.RESOLVED, elements=elements)
    return Composition(CompositionOutcome.PARSE_ERROR, reason=first_error or "unparseable")

# Quantity and formula parsing walkthrough.
#
# Temperatures normalise to kelvin, pressures to gigapascal, and chemical
# formulas resolve to element->coefficient maps (or report their doping
# variables, or fail with a reason).

from matstage.parsing import (
    QuantityParseError,
    parse_composition,
    parse_pressure,
    parse_temperature,
)

print("== temperatures ==")
for raw in ["39 K", "1.5 mK", "-5 K", "25 °C", "300", "41]"]:
    try:
        q = parse_temperature(raw)
        print(f"  {raw!r:12} -> {q.magnitude} {q.unit.value}")
    except QuantityParseError as exc:
        print(f"  {raw!r:12} -> error: {exc.reason}")

print("\n== pressures ==")
for raw in ["15 GPa", "150 kbar", "2000 MPa", "high pressure"]:
    try:
        q = parse_pressure(raw)
        print(f"  {raw!r:16} -> {q.magnitude} {q.unit.value}")
    except QuantityParseError as exc:
        print(f"  {raw!r:16} -> error: {exc.reason}")

print("\n== formulas ==")
for raw in [
    " MgB₂ ",                # unicode subscripts, surrounding junk
    "La(O0.9F0.1)FeAs",      # nested group with fractional counts
    "Ba1-xKxFe2As2",         # doping variables stay symbolic
    "YBa2Cu3O7−δ,",          # unicode minus and trailing punctuation
    "h-BN",                  # phase prefix handled by the relaxed stage
    "MgB2 (film)",           # trailing annotation
    "???",                   # unprocessable
]:
    result = parse_composition(raw)
    print(f"  {raw!r:22} -> {result.to_json()}")

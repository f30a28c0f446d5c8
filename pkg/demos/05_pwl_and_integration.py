"""Exact piecewise-linear analysis and integration.

A single-input network computes a continuous piecewise-linear function.
Building that function exactly (breakpoints and affine pieces as
rationals) gives decision procedures for free: the zero test is a
structural comparison, and integration is trapezoid areas.  The same
integral is also expressible as a closed query, evaluated purely by the
logic engine over the network expanded with interval endpoints -- the
two routes must agree to the last bit.
"""

from fractions import Fraction

from wsq import (
    evaluate,
    fnn_from_json,
    make_integrate_2_1,
    pwl_integral,
    rational,
    to_pwl,
    zero_query,
)

clamp = fnn_from_json(
    {
        "nodes": [
            {"name": "u"},
            {"name": "h1", "bias": "0"},
            {"name": "h2", "bias": "-1"},
            {"name": "o", "bias": "0"},
        ],
        "edges": [
            {"from": "u", "to": "h1", "weight": "1"},
            {"from": "u", "to": "h2", "weight": "1"},
            {"from": "h1", "to": "o", "weight": "1"},
            {"from": "h2", "to": "o", "weight": "-1"},
        ],
        "input_order": ["u"],
        "output_order": ["o"],
    }
)

p = to_pwl(clamp)
print("breakpoints:", p.breakpoints)
print("pieces:     ", p.pieces)
print("value at 1/2:", p.at(Fraction(1, 2)))

# exact integral over [0, 2]: triangle 1/2 plus rectangle 1
print(pwl_integral(p, rational(0), rational(2)))  # 3/2

# the closed query computes the same integral from inside the logic,
# reading the interval from the weight constants lo and hi
expanded = clamp.structure.expand(weights={"lo": (0, {(): 0}), "hi": (0, {(): 2})})
print(evaluate(make_integrate_2_1(), expanded))   # 3/2

# a network that cancels itself is identically zero, decided exactly
cancel = fnn_from_json(
    {
        "nodes": [
            {"name": "u"},
            {"name": "h1", "bias": "0"},
            {"name": "h2", "bias": "0"},
            {"name": "o", "bias": "0"},
        ],
        "edges": [
            {"from": "u", "to": "h1", "weight": "1"},
            {"from": "u", "to": "h2", "weight": "1"},
            {"from": "h1", "to": "o", "weight": "1"},
            {"from": "h2", "to": "o", "weight": "-1"},
        ],
        "input_order": ["u"],
        "output_order": ["o"],
    }
)
print(zero_query(cancel), zero_query(clamp))  # True False

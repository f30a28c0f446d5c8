"""Recursion via the inflationary fixed-point operator.

Depth-bounded evaluation breaks on padded networks: inserting weight-1,
bias-0 relay nodes preserves the computed function but pushes nodes past
any fixed depth bound.  The fixed-point term has no bound, so it tracks
the function itself.  Iteration defines each table entry at most once,
which keeps it terminating -- and polynomial, unless a term multiplies
the in-progress table into itself, as the squaring example shows.
"""

from wsq import (
    evaluate,
    fnn_from_json,
    forward,
    ifp_iterate,
    make_eval,
    make_eval_node,
    pad,
    with_input,
)
from wsq.queries import make_squaring
from wsq.syntax import to_text

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

# padding an edge with relays leaves the function untouched
padded = pad(clamp, ("u", "h1"), 4)
print(clamp.depth, "->", padded.depth)             # 2 -> 6
print(forward(clamp, [5]) == forward(padded, [5])) # True

# the depth-2 term now comes back undefined on the padded net ...
bounded = make_eval(2, 1)
print(evaluate(bounded, with_input(clamp, [5])))   # 1
print(evaluate(bounded, with_input(padded, [5])))  # bot

# ... while the fixed-point term still evaluates the function
unbounded = make_eval_node()
print(to_text(unbounded))
print(evaluate(unbounded, with_input(padded, [5])))  # 1

# the fixed-point table fills layer by layer; entries never change
body = make_eval_node(closed=False).body
table = ifp_iterate("F", ("x",), body, with_input(clamp, [5]))
print({node: str(v) for (node,), v in sorted(table.entries.items())})
print("stabilized after", table.rounds, "productive rounds")

# iterated squaring: a term outside the scalar fragment really does
# produce doubly exponential values
path = fnn_from_json(
    {
        "nodes": [{"name": "n0"}] + [{"name": f"n{i}", "bias": "0"} for i in (1, 2, 3, 4)],
        "edges": [{"from": f"n{i}", "to": f"n{i+1}", "weight": "1"} for i in range(4)],
        "input_order": ["n0"],
        "output_order": ["n4"],
    }
)
sigma = make_squaring()
print(evaluate(sigma, path.structure, {"x": "n4"}))  # 2**16 = 65536

"""Feedforward ReLU networks as weighted structures.

A network is just a weighted structure over ``wt, bias, le_in, le_out``,
so the same query language applies to it.  The forward pass is exact
rational arithmetic and doubles as the oracle for the logical
evaluation templates.
"""

from fractions import Fraction

from wsq import evaluate, fnn_from_json, forward, make_basic, make_eval, with_input

# the "clamp": relu(x) - relu(x - 1), i.e. 0 below 0, x on [0,1], 1 above
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

print(clamp.input_dim, clamp.output_dim, clamp.depth)  # 1 1 2
for x in (-3, Fraction(1, 2), 5):
    print(x, "->", forward(clamp, [x]))

# counting queries see the network as a plain structure
print(evaluate(make_basic("weights_count"), clamp.structure))  # 7

# the depth-bounded evaluation term reproduces the forward pass when the
# input is attached as a unary weight function
with_half = with_input(clamp, [Fraction(1, 2)])
term = make_eval(clamp.depth, 1)
print(evaluate(term, with_half))  # 1/2

# at a node deeper than the bound the term is undefined
print(evaluate(make_eval(1), with_half, {"x": "o"}))  # bot

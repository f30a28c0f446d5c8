"""Querying weighted graphs.

A weighted graph is a structure with one binary weight function ``wt``;
an edge exists exactly where the weight is defined.  Queries are written
in a small concrete syntax with summation over definable sets.
"""

from itertools import product

from wsq import WeightedStructure, evaluate, make_basic, parse
from wsq.syntax import to_text

# four vertices, two directed triangles: a->b->c->a (weight 6)
# and a->b->d->a (weight 9)
graph = WeightedStructure.build(
    ["a", "b", "c", "d"],
    weights={
        "wt": (
            2,
            {
                ("a", "b"): 1,
                ("b", "c"): 2,
                ("c", "a"): 3,
                ("b", "d"): 3,
                ("d", "a"): 5,
            },
        )
    },
)

print(evaluate(parse("count {x : x = x}"), graph))                      # 4
print(evaluate(parse("sum {x, y : wt(x, y) != bot} wt(x, y)"), graph))  # 14
print(evaluate(parse("max {x, y : wt(x, y) != bot} wt(x, y)"), graph))  # 5

# built-in templates are ASTs; print one to see the generated syntax
triangles = make_basic("triangles_count")
print(to_text(triangles))
print(evaluate(triangles, graph))  # 6: both directed triangles, 3 rotations each

# the minimum-weight-triangle formula holds exactly on the rotations of
# the lighter triangle
lightest = make_basic("min_wt_triangle")
hits = [
    (x, y, z)
    for x, y, z in product(graph.universe, repeat=3)
    if evaluate(lightest, graph, {"x": x, "y": y, "z": z})
]
print(hits)  # [('a', 'b', 'c'), ('b', 'c', 'a'), ('c', 'a', 'b')]

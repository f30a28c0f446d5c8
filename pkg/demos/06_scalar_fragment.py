"""The scalar fragment: which recursive queries stay polynomial.

Fixed-point terms can square their own table and reach values of
doubly exponential bit length.  The scalar fragment forbids that shape:
no product of two subterms that both carry fixed-point-bound symbols,
and no division by one.  The checker reports each offending operator
with its position.
"""

from wsq import check_scalar_fragment, make_eval_node, parse
from wsq.queries import make_squaring
from wsq.syntax import to_text, vocabulary_of

evaluator = make_eval_node()
squaring = make_squaring()

for name, term in [("evaluation", evaluator), ("squaring", squaring)]:
    info = vocabulary_of(term)
    print(f"{name}:")
    print("  text:", to_text(term))
    print("  extensional weights:", info.weights, " intensional:", info.intensional)
    violations = check_scalar_fragment(term)
    if not violations:
        print("  in sIFP(SUM)")
    else:
        for v in violations:
            print("  NOT in sIFP(SUM):", v.describe())

# scaling by an extensional weight is fine; squaring the table is not
good = parse("ifp (F(x) <- wt(x, x) * F(x)) (x)")
bad = parse("ifp (F(x) <- F(x) * F(x)) (x)")
print("one-sided product ok:", check_scalar_fragment(good) == [])
print("two-sided product ok:", check_scalar_fragment(bad) == [])

# shadowing: a fresh inner binder owns its occurrences
shadowed = parse("ifp (F(x) <- ifp (F(y) <- F(y) * wt(y, y)) (x)) (x)")
print("shadowed inner binder ok:", check_scalar_fragment(shadowed) == [])

"""Exact arithmetic with an undefined element.

Every value in the engine is an arbitrary-precision rational or the
undefined element ``bot``.  There is no floating point anywhere: results
are exact no matter how long the computation chain gets.
"""

from wsq import BOT, ExtRational, rational, sum_all

# canonical form is automatic
print(rational(2, 3) * rational(3, 4))  # 1/2
print(rational(4, 2))                   # 2

# bot absorbs arithmetic and division by zero produces it
print(rational(1) / rational(0))        # bot
print(BOT + rational(5))                # bot
print(rational(0) / rational(0))        # bot

# the order is total: bot sits below every rational
print(BOT < rational(-10**9))           # True
print(sorted([rational(1, 3), BOT, rational(-2)]))  # [bot, -2, 1/3]

# sums: empty -> 0, any undefined summand -> undefined
print(sum_all([]))                                        # 0
print(sum_all([rational(1, 3), rational(1, 6)]))          # 1/2
print(sum_all([rational(1, 2), BOT, rational(7)]))        # bot

# decimal text converts exactly, and huge values round-trip
print(ExtRational.parse("0.25"))        # 1/4
big = rational(2)
for _ in range(10):
    big = big * big
print(len(str(big)))                    # 309 digits of 2**1024
print(ExtRational.parse(str(big)) == big)

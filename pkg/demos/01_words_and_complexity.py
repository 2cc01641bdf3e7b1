# Words, blocks and complexity for the tau(3,5,0) system
from sadic import example_1_2, complexity_formula, calibrate, limsup_estimate
from sadic.complexity import sample_language, right_special
from sadic.structure import lengths
from sadic.words import decompose, prefix

sys = example_1_2()

# the level words: v_k and u_k grow like the Perron root (about 3.56)
for k in range(4):
    print(k, sys.word_v(k), sys.word_u(k))
print("lengths", lengths(sys, 8))

x = prefix(sys, 60)
print(x)

# every factor splits into level-1 blocks
print(decompose(sys.word_v(2) + sys.word_u(2), sys, 1).blocks)

# brute-force complexity against the interval count
sample = sample_language(sys, 40)
cal = calibrate(sys)
for q in (3, 4, 14, 15, 40):
    print(q, len(sample.factors[q]), complexity_formula(sys, q, cal))

print("right special at length 3:", sorted(right_special(sample, 3)))

# p(q)/q at the special lengths and the exact limit
est = limsup_estimate(sys, 12)
for s in est.values[:6]:
    print(s.k, s.kind, s.q, s.p, float(s.ratio))
print("limit", est.closed_form, "=", est.limit)

# Eigenvalues and the equicontinuous factor for the three worked systems
from fractions import Fraction

from sadic import example_1_2, example_1_3, example_1_4, mef
from sadic.balance import measure_cylinder
from sadic.mef import compare_eigenvalue_groups
from sadic.spectrum import (alpha_enclosure, eigenvalue_group, eigenvalue_membership,
                            eigenvalue_offsets, irrationality_witness)

ex12, ex13, ex14 = example_1_2(), example_1_3(), example_1_4()

# alpha for tau(3,5,0) is (sqrt(17)-3)/4
enc = alpha_enclosure(ex12, 25)
print("alpha in", float(enc.lo), float(enc.hi), "width", float(enc.width))
print("simplest rational in a deep enclosure:", irrationality_witness(ex12, 20)[0])

# rational offsets q_k alpha + rho_k
for q, rho in eigenvalue_offsets(ex12, 4):
    print(q, rho)

desc = eigenvalue_group(ex12, 20)
for q, r in [(1, 0), (0, Fraction(1, 2)), (Fraction(-3, 2), Fraction(1, 2))]:
    print(f"{q} alpha + {r}:", eigenvalue_membership(desc, q, r))

# cylinder measures land in the eigenvalue group too
m = measure_cylinder(ex12, "00")
print("mu[00] =", m.alpha_coeff, "alpha +", m.rational_part, "~", float(m.enclosure.mid))

for s in (ex12, ex13, ex14):
    print(s.name, "->", mef(s, 12).describe())

d12, d14 = eigenvalue_group(ex12, 12), eigenvalue_group(ex14, 12)
print("1.2 vs 1.4:", compare_eigenvalue_groups(d12, d14))

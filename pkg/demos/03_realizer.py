# Build systems with a prescribed equicontinuous factor and complexity excess
from fractions import Fraction

from sadic.realizer import INF, TargetSpec, perturbed, realize, verify_realization

targets = [
    TargetSpec(repeat=(2,), delta=Fraction(1, 4)),                    # binary odometer
    TargetSpec(nil_exponents=((2, INF),), delta=Fraction(1, 4)),       # M_2, trivial odometer
    TargetSpec(prefix=(3,)),                                          # Z/3 x circle
]

for t in targets:
    sys = realize(t, 8)
    print(t.to_json(), "regime", t.regime)
    print("  taus", [p.as_list() for p in sys.taus(6)])
    rep = verify_realization(sys, t, K=8)
    for c in rep.checks:
        print("  ", c.name, c.ok, c.detail)
    # bumping one n_k breaks it
    bad = verify_realization(perturbed(sys, 2), t, K=8)
    print("  perturbed passes?", bad.passed)

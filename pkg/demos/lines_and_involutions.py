import numpy as np

from realsft.holcurve import AmbientInvolution, RationalLineMap, detect_pseudo_fixed, fixed_residual
from realsft.holcurve import manufacture_pseudo_fixed, normalize_to_fixed, random_mobius, search_invariant_lines
from realsft.mobius import AntiInvolution, MobiusMap, Sheet, classify_pair, embed_hyperboloid
from realsft.mobius import fixed_point_set, min_displacement, sample_hyperboloid
from realsft.quadric import Quadric, enumerate_lines, random_configuration

rng = np.random.default_rng(0)

## Lines through a point meeting a cycle
counts = [len(enumerate_lines(*random_configuration(n, rng))) for n in (3, 4, 5) for _ in range(10)]
print("lines through p meeting C:", counts)

## Anti-holomorphic involutions of the projective line
for sheet in (Sheet.PLUS, Sheet.MINUS):
    x = sample_hyperboloid(sheet, rng, 1)[0]
    inv = AntiInvolution(embed_hyperboloid(sheet, x))
    circle = fixed_point_set(inv)
    print(sheet.value, classify_pair(inv.mobius_part).value,
          "fixed circle radius" if circle else "grid min displacement",
          round(circle.radius, 4) if circle else round(min_displacement(inv), 4))

antipodal = AntiInvolution(MobiusMap([[0, 1], [-1, 0]]))
print("antipodal map:", classify_pair(antipodal.mobius_part).value, fixed_point_set(antipodal))

## Pseudo-fixed lines and their fixed reparametrizations
conj = AmbientInvolution.conjugation(4)
real_line = RationalLineMap(Quadric(np.diag([1.0, 1.0, -1.0, -1.0])), [[1, 0, 1, 0], [0, 1, 0, 1]])
u = manufacture_pseudo_fixed(real_line, random_mobius(rng))
res = detect_pseudo_fixed(u, conj)
print("status:", res.status.value, "type:", res.cls.value, "residual before:", f"{fixed_residual(u, conj):.2e}")
print("residual after normalizing:", f"{fixed_residual(normalize_to_fixed(u, res, conj), conj):.2e}")

## A quaternionic structure gives only type II lines
rho = AmbientInvolution([1, 0, 3, 2, 5, 4], [1, -1, 1, -1, 1, -1])
for line in search_invariant_lines(Quadric.standard(4), rho, count=3, seed=1):
    r = detect_pseudo_fixed(line, rho)
    print("quaternionic:", r.status.value, r.cls.value)

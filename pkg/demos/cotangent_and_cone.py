import numpy as np

from realsft.cotangent import (
    CotangentState,
    cotangent_to_quadric,
    induced_involution,
    pullback_residual,
    quadric_to_cotangent,
    random_affine_point,
    random_cone_point,
    random_tangent_vector,
    reeb_liouville_fields,
    sft_residuals_at,
)

rng = np.random.default_rng(0)

## The affine quadric as the cotangent bundle of the sphere
z = random_affine_point(2, rng, spread=2.0)
s = quadric_to_cotangent(z)
print("z =", np.round(z.z, 4))
print("q =", np.round(s.q, 4), " p =", np.round(s.p, 4), " <q,p> =", f"{s.q @ s.p:.1e}")
print("round trip error:", f"{np.abs(cotangent_to_quadric(s).z - z.z).max():.1e}")

worst = max(
    r / sc
    for r, sc in (pullback_residual(z, random_tangent_vector(z, rng), random_tangent_vector(z, rng)) for z in
                  (random_affine_point(2, rng) for _ in range(100)))
)
print("largest scaled pullback residual over 100 samples:", f"{worst:.1e}")

## The involution induced by a reflection
reflection = np.diag([1.0, 1.0, -1.0])
t = induced_involution(reflection, s)
print("rho(q, p) =", np.round(t.q, 4), np.round(t.p, 4))

## Reeb field and SFT-likeness of i on the cone
data = reeb_liouville_fields(CotangentState([1, 0, 0], [0, 0, 1]))
print("Reeb field at ((1,0,0),(0,0,1)):", data.reeb)
print("alpha(R) - 1 and d alpha(R, .):", data.reeb_residuals())
print("|iX - R|, |iR + X| at random cone points:")
for _ in range(3):
    print("  ", ["%.1e" % r for r in sft_residuals_at(random_cone_point(2, rng))])

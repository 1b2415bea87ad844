import numpy as np

from realsft.energy import (
    cylinder_disk,
    disk_bound_check,
    disk_mesh,
    inflated_disk,
    line_disk,
    line_disk_area,
    sft_energy_estimate,
    smooth_test_form,
    stokes_residual,
    synthetic_disk,
)
from realsft.quadric import enumerate_lines, random_configuration

## Stokes residual under mesh halving
a, b, dens = smooth_test_form()
res = [stokes_residual(synthetic_disk(a, b, dens, disk_mesh(1.0, k))) for k in (4, 8, 16, 32)]
print("residuals:", ["%.2e" % r for r in res])
print("ratios:", [round(c / f, 3) for c, f in zip(res, res[1:])])

## Energy of a disk on the cylindrical end
disk = cylinder_disk(1.5, rings=32)
for size in (2, 8, 32, 128):
    print(f"profiles {size:4d}: estimate {sft_energy_estimate(disk, size):.4f}  (supremum 2)")

## Line disks have area at most one
q, p, dec = random_configuration(3, np.random.default_rng(0))
line = enumerate_lines(q, p, dec)[0]
for radius in (1.0, 3.0, 30.0, 1000.0):
    check = disk_bound_check(line_disk(line, dec, radius))
    print(f"radius {radius:7.1f}: area {check['value']:.6f}, exact {line_disk_area(radius):.6f}, pass {check['pass']}")
print("inflated disk:", disk_bound_check(inflated_disk(1.5)))

import numpy as np

from realsft.orbits import find_symmetric_orbit, geodesic_system, hill_hamiltonian, hill_system

## Meridians of the round sphere
geo = geodesic_system()
for theta in (0.3, 1.7, 4.0):
    orb = find_symmetric_orbit(geo, [theta], geo.default_half_period)
    print(f"seed angle {theta}: T - 2 pi = {orb.T - 2 * np.pi:+.1e}, "
          f"closure {orb.residuals['closure']:.1e}, symmetry {orb.residuals['symmetry']:.1e}")

## Hill's lunar problem below the critical energy
for involution in (1, 2):
    hill = hill_system(involution)
    orb = find_symmetric_orbit(hill, hill.default_seed, hill.default_half_period, energy=hill.default_energy)
    print(f"{hill.name}: x0 = {np.round(orb.x0, 6)}, T = {orb.T:.6f}, H = {hill_hamiltonian(orb.x0):.12f}")
    print(f"  symmetry {orb.residuals['symmetry']:.1e}, energy drift {orb.residuals['energy_drift']:.1e}, "
          f"period-1 scale {orb.lambda_scale:.4f}")

## Samples for plotting elsewhere
csv_text = orb.to_csv()
print(csv_text.splitlines()[0], "...", f"{len(csv_text.splitlines()) - 1} rows")

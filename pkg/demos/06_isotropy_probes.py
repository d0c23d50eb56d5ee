"""Stabilizer and rank probes at crafted principal points.

Each crafted point combines an alcove-interior element, apposition-torus
data and torus commutator solutions so that the joint stabilizer of the
symmetry action and the family torus action is exactly the center.

Run me directly:  python demos/06_isotropy_probes.py
"""

import numpy as np

import sunflows as sf
from sunflows import probes

n = 3
datum = sf.build_root_datum(n)
rng = np.random.default_rng(1)

print(f"=== crafted principal points at n={n} ===")
print(f"{'key':30s} {'stab dim':>8s} {'center':>7s} {'min sv':>10s}")
for key in probes.PRINCIPAL_POINT_KEYS:
    pp = probes.principal_test_point(key, n, datum, rng)
    rep = probes.stabilizer_dimension(pp.point, pp.action, n, key)
    print(f"{key:30s} {rep.infinitesimal_dim:8d} {str(rep.center_fixes):>7s} "
          f"{rep.singular_values.min():10.2e}")

print("\n=== a non-principal control: a torus point of the double ===")
g = np.diag(np.exp(1j * np.array([0.7, -0.2, -0.5])))
x = sf.moduli_point(sf.double_space(n), [(g, g)], [])
rep = probes.stabilizer_dimension(x, probes.conjugation_action(x, n), n, "torus-pair")
print("symmetry stabilizer dimension:", rep.infinitesimal_dim,
      " (the full maximal torus, as expected for commuting torus letters)")

print("\n=== rank checks at a crafted point ===")
pp = probes.principal_test_point("two-handles-with-holes", n, datum,
                                 np.random.default_rng(5))
rep = probes.ieq_rank_check(pp, n, invariant_probes=[
    lambda p: float(np.trace(p.pair(1)[0]).real),
    lambda p: float(np.trace(p.momentum()).real),
    lambda p: float(np.trace(p.hole(1) @ p.hole(2)).real),
])
print("torus generator rank:", rep.generator_rank, "expected:", rep.generator_expected)
print("family differential rank:", rep.differential_rank,
      "expected:", rep.differential_expected)
print("symmetry orbit rank:", rep.symmetry_orbit_rank, f"(dim of the group is {n * n - 1})")
print("invariant probe rank:", rep.invariant_probe_rank)

print("\n=== displacement under nontrivial torus angles ===")
pp = probes.principal_test_point("sphere-adjoint-torus", n, datum, np.random.default_rng(9))
torus_curves = pp.action.curves[n * n - 1:]
moved = torus_curves[0](pp.point, 0.5)
print("distance after a half-radian turn:", f"{probes.point_distance(moved, pp.point):.3f}")

"""The Heisenberg double: factorization flows and their conserved quantities.

Points are elements of SL(n, C); the two commuting families pull back
dressing invariants of the right Borel factor and class functions of the
right unitary factor.  Flows are pure factorization formulas.

Run me directly:  python demos/04_heisenberg_double.py
"""

import numpy as np

import sunflows as sf
from sunflows import brackets, decomp
from sunflows.observables import AlcoveCoroot, BorelChamberCoroot, BorelPower, PowerTrace, word_observable
from sunflows.spaces import heisenberg_momentum, random_heisenberg_point

rng = np.random.default_rng(23)
n = 2
datum = sf.build_root_datum(n)
x = random_heisenberg_point(n, rng)
f0 = x.factors()

print("=== the double as a pair (unitary, Borel) ===")
print("right unitary factor:\n", np.round(f0.u_right, 4))
print("right Borel factor:\n", np.round(f0.b_right, 4))

print("\n=== Borel-family flow conserves the whole right Borel factor ===")
ham = BorelPower(1)
y = sf.heisenberg_flow(x, ham, 1.2)
print("b_right drift:", f"{np.linalg.norm(y.factors().b_right - f0.b_right):.2e}")
print("group momentum drift:",
      f"{np.linalg.norm(heisenberg_momentum(y) - heisenberg_momentum(x)):.2e}")

print("\n=== class-family flow moves the unitary factor by conjugation ===")
from sunflows.flows import heisenberg_flow_unitary_part

ham2 = PowerTrace(2)
tau = 0.9
y2 = sf.heisenberg_flow(x, ham2, tau)
gamma = heisenberg_flow_unitary_part(x, ham2, tau)
law = np.linalg.norm(y2.factors().u_right - gamma @ f0.u_right @ gamma.conj().T)
print("conjugation law residual:", f"{law:.2e}")
w0 = f0.b_left @ f0.b_right @ f0.u_left.conj().T
f2 = y2.factors()
w2 = f2.b_left @ f2.b_right @ f2.u_left.conj().T
print("triangular invariant drift:", f"{np.linalg.norm(w2 - w0):.2e}")

print("\n=== bracket consistency ===")
probe = word_observable(("x", "x", "xh"))
for ham, obs in ((BorelPower(1), lambda p: BorelPower(1).value(p.factors().b_right)),
                 (PowerTrace(2), lambda p: PowerTrace(2).value(p.factors().u_right))):
    d_flow = brackets.directional_derivative(probe, lambda t: sf.heisenberg_flow(x, ham, t))
    bk = brackets.heisenberg_bracket(probe, obs, x)
    print(f"  d/dt probe = {d_flow:+.8f}   bracket = {bk:+.8f}   diff = {abs(d_flow - bk):.1e}")

print("\n=== the two torus directions ===")
dress_turn = sf.heisenberg_torus_action(x, np.array([2 * np.pi]), "dress", datum)
print("dressing torus closes after 2*pi:", f"{dress_turn.distance(x):.2e}")
line = sf.heisenberg_torus_action(x, np.array([2 * np.pi]), "translate", datum)
print("translation direction does not:", f"{line.distance(x):.2f}")
print("(the latter is the proper line action attached to the class family)")

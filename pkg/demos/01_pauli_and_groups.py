"""Tour of the Pauli-string algebra and the two decoupling groups.

Pauli strings are stored as a pair of bitmasks plus an exact power of i,
so products, adjoints and conjugation signs never touch floating point.
"""

import numpy as np

from ddchain import PauliString, conjugate_sign
from ddchain.groups import build_collective_group, build_nested_group, path_table, q_r_counts

P = PauliString.from_letters

print("== exact products ==")
for a, b in (("X", "Y"), ("ZY", "YY"), ("IZXY", "YXZI")):
    print(f"  {a} * {b} = {P(a) * P(b)}")

print("\nconjugation signs (g† h g = ±h):")
for g, h in (("Z", "X"), ("ZI", "ZZ"), ("XX", "YY")):
    print(f"  {g}† {h} {g} = {conjugate_sign(P(g), P(h)):+d} · {h}")

# The nested group assigns one of {I, Z, X, Y} to every even qubit and
# walks all 4^m combinations along a Gray code, so each pulse is a
# single-qubit rotation.  Rows below are the controlled qubits, columns
# the position along the path.
print("\n== nested group, N = 4 (m = 2 controlled qubits) ==")
group, path = build_nested_group(4)
print(path_table(path))
print(f"|G| = {len(group)}, closed: {group.is_closed()}")

print("\npulses along the path (single-qubit until the cycle closes):")
print("  " + " ".join(p.phase_free().letters for p in path.pulses))

# Q_R counts how many group elements act on exactly R even qubits;
# the maximum tells which error weight dominates the averaging.
print("\nQ_R table:")
for m in range(1, 8):
    qr = q_r_counts(m)
    print(f"  m={m}: {qr.counts}  (max at R = {qr.maxima})")

print("\n== collective group (system-size independent, 4 pulses) ==")
group, path = build_collective_group(6)
for g in group.elements:
    print(f"  {g.letters}")

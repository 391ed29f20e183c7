"""Compare Otto engine power with and without a bath memory.

A resonant ancilla between qubit and bath turns plain exponential relaxation
into a damped oscillation. The peak power then grows with the coupling y.

Run with `python3 demos/otto_memory.py`.
"""
from qthermo.nonmarkov import optimal_coupling, otto_max_sweep, sd_amplitude_resonant

print("  y     tau*     power ratio")
for y, tau, ratio in otto_max_sweep([0.0, 0.5, 1.0, 2.0, 4.0]):
    print(f"{y:4.1f}  {tau:7.4f}  {ratio:8.4f}")

# Slow driving prefers a finite coupling unless the ancilla is very slow.
for c in (0.3, 1.0, 3.0):
    y = optimal_coupling(c)
    label = "none (decreases forever)" if y == float("inf") else f"{y:.4f}"
    print(f"c={c}: best coupling {label}, amplitude at y=1 {sd_amplitude_resonant(c, 1.0):.4f}")

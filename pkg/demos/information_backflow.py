"""Track where free energy goes when a qubit relaxes through an ancilla.

Run with `python3 demos/information_backflow.py`.
"""
import numpy as np

from qthermo.infoflow import blp_measure, blp_threshold, free_energy_trace
from qthermo.nonmarkov import AncillaBathSpec

for y in (0.5, 1.0, 2.0, 4.0):
    N = blp_measure(AncillaBathSpec(1.0, 1.0, 1.0, y, 1.0), 1.0, 0.0)
    print(f"y={y}: backflow {N:.4e}")
print(f"backflow switches on near y={blp_threshold():.4f}")

tr = free_energy_trace(AncillaBathSpec(2.5, 1.0, 1.0, 2.0, 1.0), np.diag([0.7, 0.3]), 10.0, 2001)
for t in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0):
    i = int(np.searchsorted(tr.times, t))
    print(f"t={t:4.1f}  total {tr.F_total[i]:.4f}  system {tr.F_S[i]:.4f}  "
          f"ancilla {tr.F_A[i]:.4f}  correlations {tr.MI[i]:.4f}")

"""Walk through a slowly driven qubit Carnot engine.

Run with `python3 demos/carnot_engine.py`.
"""
import numpy as np

from qthermo.carnot import cycle_report, optimal_rescaling, quasi_otto_constants, rescaled_efficiency
from qthermo.dissipators import BathSpec
from qthermo.protocols import random_protocol

T_C, T_H = 1.0, 3.0

rng = np.random.default_rng(0)
hot = random_protocol(0.9, 0.6, rng, tau=60.0)
cold = random_protocol(0.6, 0.9, rng, tau=60.0)
r = cycle_report(hot, cold, BathSpec(T_H, 1.0), BathSpec(T_C, 1.0))
print(f"random cycle: power {r.power:.4e}, efficiency {r.eta:.4f} (Carnot bound {r.eta_carnot:.4f})")
print(f"first-order heats are losses: Q1_H={r.Q1_H:.3e}, Q1_C={r.Q1_C:.3e}")

# Stretching each stroke in time trades power against efficiency.
lc, lh = optimal_rescaling(r.alpha_C, r.alpha_H, r.tau_C, r.tau_H, 1 / T_C, 1 / T_H)
eta = rescaled_efficiency(lc, lh, r.alpha_C, r.alpha_H, 1 / T_C, 1 / T_H)
print(f"best stretch factors ({lc:.3f}, {lh:.3f}) give efficiency {eta:.4f}")
print(f"Curzon-Ahlborn value {1 - np.sqrt(T_C / T_H):.4f}")

xi, q = quasi_otto_constants()
print(f"quasi-Otto limit: xi={xi:.5f}, optimal ground population {q:.5f}")

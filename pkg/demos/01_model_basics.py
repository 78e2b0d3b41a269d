# =============================================================================
# Model basics: intensities, compensators, and kernel norms
#
# Builds a trivariate Hawkes model of blockchain activity --
#   component 1 = block arrivals (B)
#   component 2 = positive price jumps (P_u)
#   component 3 = negative price jumps (P_d)
# -- and walks through the quantities the rest of the toolkit is built on.
#
# Run:  python demos/01_model_basics.py
# =============================================================================

import numpy as np

from blockhawkes import (
    EventSequence,
    HawkesModel,
    SumExpKernel,
    compensator,
    compensator_quadrature,
    intensity_naive,
    intensity_recursive,
    kernel_norms,
    spectral_radius,
)

np.set_printoptions(precision=4, suppress=True)

# -----------------------------------------------------------------------------
# 1. A sum-of-exponentials kernel with three shared decay scales
# -----------------------------------------------------------------------------
# alpha[u, i, j] is the jump that a type-j event adds to component i's
# intensity on decay scale u; decays are per hour, so 2.34 relaxes in ~25
# minutes while 21.9 relaxes in ~3 minutes.
alpha = np.array(
    [
        [[1.377, 1.635, 1.615], [0.244, 0.118, 0.558], [0.326, 0.497, 0.096]],
        [[1.526, 0.0, 0.215], [0.0, 0.0, 2.131], [0.0, 0.147, 0.0]],
        [[0.02, 0.0, 0.0], [0.0, 0.0, 1.357], [0.0, 0.0, 1.383]],
    ]
)
decays = np.array([2.340, 15.730, 21.875])
mu = np.array([3.0, 1.0, 1.0])  # background rates, events/hour

model = HawkesModel(mu, SumExpKernel(alpha, decays))

labels = ["B  ", "P_u", "P_d"]
print("=" * 70)
print("Kernel norms: expected direct offspring of type i per type-j event")
print("=" * 70)
norms = kernel_norms(model)
print("        " + "   ".join(f"from {l}" for l in labels))
for i in range(3):
    print(f"to {labels[i]}  " + "    ".join(f"{norms[i, j]:.3f}" for j in range(3)))

rho = spectral_radius(norms)
print(f"\nspectral radius = {rho:.4f}  ({'stationary' if rho < 1 else 'EXPLOSIVE'})")
print("note: entries (1,2) and (1,3) say price jumps in either direction")
print("raise the block arrival rate; (2,3)/(3,2) capture mean reversion.")

# in the stationary regime, average rates solve (I - K) r = mu
rates = np.linalg.solve(np.eye(3) - norms, mu)
print(f"\nimplied stationary rates: {rates.round(1)} events/hour")
print(f"(background only: {mu}; excitation multiplies activity "
      f"{rates.sum() / mu.sum():.1f}x here -- this model is near-critical)")

# -----------------------------------------------------------------------------
# 2. Conditional intensity around a burst of events
# -----------------------------------------------------------------------------
print()
print("=" * 70)
print("Intensity of the block component around three events")
print("=" * 70)
seq = EventSequence(
    times=[1.0, 1.05, 1.4], marks=[2, 3, 1], horizon=3.0, dim=3
)
print("events: up-jump @ 1.00 h, down-jump @ 1.05 h, block @ 1.40 h\n")
print(f"{'t (h)':>6}  lambda_B(t) (events/h)")
for t in (0.5, 1.0, 1.01, 1.1, 1.41, 2.0, 3.0):
    lam = intensity_naive(model, seq, 1, t)
    bar = "#" * int(lam)
    print(f"{t:>6.2f}  {lam:>8.3f}  {bar}")
print("\nthe left-limit convention means lambda at t=1.0 has not yet jumped.")

# the recursive evaluator gives the same numbers at event times, in O(n)
lambdas, _ = intensity_recursive(model, seq)
naive = [intensity_naive(model, seq, int(d), float(t)) for t, d in zip(seq.times, seq.marks)]
print(f"recursive vs naive at events: max diff = "
      f"{np.max(np.abs(lambdas - np.asarray(naive))):.2e}")

# -----------------------------------------------------------------------------
# 3. Compensators: closed form vs numerical quadrature
# -----------------------------------------------------------------------------
print()
print("=" * 70)
print("Compensator Lambda_B(t): closed form against adaptive quadrature")
print("=" * 70)
for t in (1.0, 2.0, 3.0):
    cf = compensator(model, seq, 1, t)
    q = compensator_quadrature(model, seq, 1, t)
    print(f"t={t:.1f} h   closed form {cf:10.6f}   quadrature {q:10.6f}   "
          f"rel diff {abs(cf - q) / q:.2e}")
print("\nLambda is what the goodness-of-fit module feeds the time-rescaling")
print("theorem; see demos/02_simulate_and_validate.py.")

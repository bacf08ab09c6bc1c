"""
Null-space precoding in a few lines.

Run with ``python demos/01_null_space_basics.py``. Everything printed is
recomputed from a fixed seed, so the numbers are stable.
"""

import numpy as np

from nullcsi.channels import RicianParams, draw_rician_channel
from nullcsi.linalg import canonical_angles, sin_theta_norm
from nullcsi.precoder import extract_null_space, project_symbols, spillover_power
from nullcsi.streams import make_stream

np.set_printoptions(precision=4, suppress=True)
rng = make_stream(7)

# A 2 x 3 interference channel always has a one-dimensional exact null
# space: three transmit antennas, two receive antennas.
H = draw_rician_channel(RicianParams(k_factor=3.0, n_rx=2, n_tx=3), rng)
exact = extract_null_space(H, threshold=0.0, mode="absolute")
print("singular values of H:", exact.sigma_all)
print("null dimension:", exact.dim)

# Anything sent through the projector vanishes at the primary receiver.
x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
print("|H P x| =", np.linalg.norm(H @ project_symbols(exact, x)))

# The secondary user only has an estimate G = H + T. Its null space is
# tilted against the true one, and some power spills over. One error
# direction is reused at every scale so only the magnitude changes.
E = rng.standard_normal(H.shape) + 1j * rng.standard_normal(H.shape)
for scale in (1e-3, 1e-2, 1e-1):
    T = scale * E
    est = extract_null_space(H + T, threshold=0.0, mode="absolute")
    angle = sin_theta_norm(canonical_angles(exact.basis, est.basis))
    leak = spillover_power(H, est, symbol_energy=1.0)
    print(f"scale {scale:g}: ||sin theta|| = {angle:.2e}, spillover = {leak:.2e}")

# For small errors the tilt is linear in the error and the spillover is
# quadratic: one decade of CSI error costs about two decades of leaked power.

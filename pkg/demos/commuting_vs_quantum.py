"""When is the random bound the whole story?

For a qubit the randomness condition holds, so the best random measurement
is optimal among all locally unbiased ones and the dual bound meets the
random bound. For a classical (commuting) model the condition fails: a single
joint measurement reaches the SLD bound tr(J^-1), which lies strictly below
the random bound.

Run: python3 demos/commuting_vs_quantum.py
"""

import numpy as np

from qcrb import check_randomness, classical_model, dual_bound, fisher, qubit_full, random_bound, sld_bound

models = {
    "qubit, alpha = 0.3": qubit_full(0.3),
    "classical 3-outcome": classical_model(np.ones(3) / 3, [np.diag([1, -1, 0]) / 2, np.diag([1, 1, -2]) / 6]),
}

for name, model in models.items():
    fd = fisher(model)
    g = np.eye(model.n)
    rep = check_randomness(model, fd)
    cert = dual_bound(model, fd, g)
    print(name)
    print(f"  randomness condition : {rep.is_random} (residual {rep.max_residual:.2e})")
    print(f"  SLD bound            : {sld_bound(fd.J, g):.6f}")
    print(f"  dual bound           : {cert.spur:.6f} ({cert.status})")
    print(f"  random bound         : {random_bound(fd.J, g):.6f}")

"""
Nine-level model, dark state and adiabaticity
=============================================

Evaluates the two effective couplings along the pulse sequence, follows the
dark state from the source corner to the target corner, and integrates the
adiabaticity area.
"""

import numpy as np

from cornerpump import CtapSchedule
from cornerpump.effective_model import (
    adiabaticity_integral,
    build_heff,
    dark_state,
    effective_couplings,
)

sched = CtapSchedule()
for t in (-300, -100, 0, 100, 300):
    e = effective_couplings(sched.couplings(t), 14)
    d = dark_state(e)
    assert np.abs(build_heff(e) @ d).max() < 1e-13
    print(f"t={t:5d}  O12={e.omega12:.2e}  O23={e.omega23:.2e}  |a1|^2={d[0]**2:.3f}  |a9|^2={d[8]**2:.3f}")

area = adiabaticity_integral(sched, 14, sched.t_start, sched.t_end)
print(f"A = {area:.2f}  (pi/2 = {np.pi / 2:.2f})")

"""Sweep the inverse-square strength of the valence-electron potential through 2P = 1.

V = -V0/r^2 - alpha/r at l = 1.  Away from 2P = 1 the s = -1 recurrence has no
boundary term; at V0 = 1 (2P = 1 exactly) the boundary term switches on and
<r^-3> itself diverges, so only the U-form of the recurrence stays finite.

    python demos/valence_resonance.py
"""

from radial_sumrules import build, make, bound_state
from radial_sumrules.moments import moment
from radial_sumrules.theorems import hypervirial_residual, structural_relations

print(f"{'V0':>8s} {'2P':>10s} {'E':>14s} {'<r^-2>':>12s} {'<r^-3>':>12s} {'Pi case':>13s} {'residual':>9s}")
for V0 in (0.0, 0.3, 0.6, 0.9, 0.99, 1.0 - 1e-9, 1.0):
    st = bound_state(make("valence_electron", V0=V0), 0, 1)
    wf = build(st)
    rep = hypervirial_residual(wf, -1.0)
    try:
        r3 = f"{moment(wf, -3).value:12.6g}"
    except ArithmeticError:
        r3 = f"{'diverges':>12s}"
    res = f"{rep.residual:9.1e}" if rep.applicable else f"{'n/a':>9s}"
    print(f"{V0:8.6g} {2 * st.P:10.7f} {st.energy:14.10f} {moment(wf, -2).value:12.6g} {r3} {rep.pi.case:>13s} {res}")

wf = build(bound_state(make("valence_electron", V0=1.0), 0, 1))
for rep in structural_relations(wf):
    if rep.identity_id in ("valence_origin", "soft_origin", "valence_spectrum"):
        print(f"{rep.identity_id:18s} lhs={rep.lhs:.12g} rhs={rep.rhs:.12g} residual={rep.residual:.1e}")

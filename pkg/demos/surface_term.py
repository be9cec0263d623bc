"""Radial-momentum balance for hydrogen with and without the origin surface term.

For l > 0 the centrifugal term alone balances the Coulomb force.  For s-waves
the centrifugal term vanishes and the balance is carried entirely by the
boundary contribution hbar^2 |R(0)|^2 / 2m.

    python demos/surface_term.py
"""

from radial_sumrules import make, bound_state
from radial_sumrules.theorems import ehrenfest_balance

spec = make("coulomb")
print(f"{'state':12s} {'Pi case':9s} {'Pi':>12s} {'lhs':>14s} {'rhs':>14s} {'residual':>9s}  without Pi")
for n_r, l in [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 2)]:
    st = bound_state(spec, n_r, l)
    rep = ehrenfest_balance(st)
    bare = ehrenfest_balance(st, zero_surface_term=True)
    print(f"{st.label():12s} {rep.pi.case:9s} {rep.pi.value:12.6g} {rep.lhs:14.10f} {rep.rhs:14.10f} "
          f"{rep.residual:9.1e}  {'holds' if bare.passed else 'fails'}")

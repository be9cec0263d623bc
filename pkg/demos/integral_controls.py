"""On-shell and 1%-off-shell residuals for the six special-function integrals.

    python demos/integral_controls.py
"""

from radial_sumrules.integrals import IDENTITY_IDS, evaluate_identity, on_shell_parameters, perturb

print(f"{'identity':16s} {'n_r':>3s} {'lhs (quadrature)':>20s} {'rhs (closed form)':>20s} {'on-shell':>9s} {'off-shell':>9s}")
for ident in IDENTITY_IDS:
    for n_r in (0, 1):
        q = on_shell_parameters(ident, n_r)
        on = evaluate_identity(ident, q)
        off = evaluate_identity(ident, perturb(ident, q, 0.01), allow_off_shell=True)
        print(f"{ident:16s} {n_r:3d} {on.lhs_quadrature.value:20.14g} {on.rhs_closed_form:20.14g} "
              f"{on.residual:9.1e} {off.residual:9.1e}")

"""Regenerate tests/golden/specfun.txt from mpmath at 50 digits.

Run once by hand; the output is committed.  mpmath is only needed here, the
library itself never imports it.

    python tools/make_golden.py > tests/golden/specfun.txt
"""

import mpmath as mp

mp.mp.dps = 50

REL = {"gamma": 1e-12, "bessel_j": 1e-10, "bessel_j_deriv": 1e-10,
       "airy_ai": 1e-10, "airy_ai_deriv": 1e-10, "kummer_1f1": 1e-10, "gauss_2f1": 1e-9}


def emit(name, args, value):
    value = mp.mpf(value)
    tol = REL[name] * max(abs(value), mp.mpf("1e-300"))
    # near a zero the relative contract is meaningless; fall back to an absolute floor
    tol = max(tol, mp.mpf("1e-14"))
    arg_s = " ".join(mp.nstr(mp.mpf(a), 20) for a in args)
    print(f"{name} {arg_s} {mp.nstr(value, 20)} {mp.nstr(tol, 3)}")


def main():
    print("# fn_name args... expected abs_tol   (mpmath, 50 digits, 20 significant stored)")
    for x in ["7.3", "0.1", "2.5", "-1.5", "-3.7", "12.25", "33.3", "49.9", "-49.5"]:
        emit("gamma", [x], mp.gamma(mp.mpf(x)))
    for nu in ["0", "0.5", "1", "2.37", "0.0878352367914291796415", "2.41441384133293535657", "5.5"]:
        for x in ["0.3", "2.0", "4.1", "7.9", "8.1", "13.0", "20.0", "31.0", "44.0"]:
            if mp.mpf(x) > 2 * mp.mpf(nu) + 40:
                continue
            emit("bessel_j", [nu, x], mp.besselj(mp.mpf(nu), mp.mpf(x)))
            emit("bessel_j_deriv", [nu, x], mp.besselj(mp.mpf(nu), mp.mpf(x), derivative=1))
    for x in ["-49.0", "-20.5", "-9.7", "-8.0", "-5.3", "-2.338107410459767", "-1.0", "0",
              "0.7", "1.9", "2.1", "4.4", "7.9", "8.2", "15.0"]:
        emit("airy_ai", [x], mp.airyai(mp.mpf(x)))
        emit("airy_ai_deriv", [x], mp.airyai(mp.mpf(x), derivative=1))
    for a, c, x in [("-2", "3", "1.1"), ("0.7", "4.3", "21.7"), ("-3.2", "2.5", "21.7"),
                    ("0.5", "1.5", "-10"), ("-5", "3", "15"), ("2.25", "6.5", "9.0")]:
        emit("kummer_1f1", [a, c, x], mp.hyp1f1(mp.mpf(a), mp.mpf(c), mp.mpf(x)))
    for a, b, c, z in [("-3", "2.2", "4.1", "1"), ("0.3", "0.7", "2.5", "1"),
                       ("0.3", "0.7", "2.5", "0.9"), ("1.5", "-2.5", "4.1", "0.99"),
                       ("2", "3", "6", "0.7"), ("1.25", "-0.75", "3.5", "0.25")]:
        emit("gauss_2f1", [a, b, c, z], mp.hyp2f1(mp.mpf(a), mp.mpf(b), mp.mpf(c), mp.mpf(z)))


if __name__ == "__main__":
    main()

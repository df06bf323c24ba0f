"""Smoke test for the zeta_moments extension module.

Build and install first:  pip install --no-build-isolation -e crates/python
"""

import math

import zeta_moments as zm


def close(a, b, tol):
    return abs(a - b) <= tol * (1 + abs(b))


def main():
    spec = zm.QuadSpec()
    assert spec.abs_tol == 1e-10 and spec.max_depth == 32

    a1 = zm.a_integral(1.0)
    assert close(a1.real, math.log(2 * math.pi) - 0.5772156649015329 - 0.5, 1e-10)
    assert close(zm.b_integral(0.7), zm.b_fourier(0.7), 1e-8)
    assert close(zm.mellin_a_numeric(0.5 + 1j), zm.q_function(0.5 + 1j), 1e-6)
    assert close(zm.psi_upper(1j), zm.psi_from_a(1j), 1e-7)
    direct, fourier = zm.b_conv(0.0, 2)
    assert abs(direct - fourier) <= 1e-7

    m = zm.moment_direct(1, 0.8)
    f = zm.formula_k1(0.8)
    assert f.method == "formula_k1" and close(f.value, m.value, 1e-7)
    assert "titchmarsh" in f.breakdown

    report, parts = zm.formula_k3(0.8)
    assert len(parts.remainders) == 5 and parts.orientation_gap < 1e-12

    try:
        zm.moment_direct(2, 0.01)
    except zm.GuardError:
        pass
    else:
        raise AssertionError("guard not raised")
    assert zm.moment_direct(1, 0.04, override_guards=True).value > 0

    assert zm.t_coeff(2, 2) == 16
    assert zm.t_coeff(40, 20) > 2**64

    rows = zm.scan_delta(2, [1.0, 0.5, 0.25])
    fractions = [r.remainder_fraction for r in rows]
    assert fractions == sorted(fractions, reverse=True)

    results = zm.run_suite("closed-form")
    assert len(results) == 5 and all(r.passed for r in results)

    print("zeta_moments smoke test: ok")


if __name__ == "__main__":
    main()

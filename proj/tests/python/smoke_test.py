"""Smoke tests for the pdflow extension module (run under ctest)."""

import math
import sys

import pdflow


def check(cond, msg):
    if not cond:
        print("FAIL:", msg)
        sys.exit(1)
    print("ok:", msg)


def main():
    names = pdflow.library_names()
    check(len(names) == 5, f"library has 5 instances: {names}")
    check("sc_quadratic" in names and "rsi_scalar" in names, "expected names present")

    out = pdflow.solve("sc_quadratic", horizon=20.0)
    check(out["kkt_residual"] <= 1e-8, f"solve kkt residual {out['kkt_residual']:.2e}")
    check(abs(out["x_final"][0] - 0.5) <= 1e-6, "solve reaches the known solution")

    cert_a = pdflow.certify("sc_quadratic")
    check(
        out["rho_hat"] >= cert_a["rho_certified"] - 1e-3,
        f"measured {out['rho_hat']:.4f} >= certified {cert_a['rho_certified']:.4f}",
    )

    cert = pdflow.certify("zero_identity")
    check(cert["rho_certified"] > 0.9 * cert["abscissa"], f"certified {cert['rho_certified']:.4f}")
    check(cert["frame"] == "original", "m = n certifies in the original frame")

    cert_b = pdflow.certify("partial_sc")
    check(cert_b["frame"] == "transformed", "m < n certifies in the transformed frame")
    check(cert_b["rho_certified"] > 0.0, "transformed certificate is positive")

    try:
        pdflow.certify("partial_sc", frame="original")
        check(False, "original frame must not certify for m < n")
    except pdflow.NotCertifiableError:
        print("ok: original frame rejected for m < n")

    cmp_out = pdflow.compare("affine_identity", horizon=50.0)
    check(abs(cmp_out["standard"]["rho_hat"]) < 1e-3, "standard flow oscillates")
    check(cmp_out["augmented"]["rho_hat"] > 0.1, "augmented flow converges")

    f = pdflow.qr_factors([[1.0], [1.0]])
    check(abs(f["r1"][0][0] - math.sqrt(2.0)) <= 1e-12, "qr r1 = sqrt(2)")
    check(abs(abs(f["q1"][0][0]) - 1.0 / math.sqrt(2.0)) <= 1e-12, "qr q1 entries")

    ev = pdflow.symmetric_eigenvalues([[1, -1, 0], [-1, 2, -1], [0, -1, 1]])
    for got, want in zip(ev, (0.0, 1.0, 3.0)):
        check(abs(got - want) <= 1e-9, f"laplacian eigenvalue {want}")

    check(abs(pdflow.spectral_abscissa([[-1, -1], [1, 0]]) + 0.5) <= 1e-8, "abscissa -0.5")

    structural, abscissa = pdflow.hurwitz_check([[1.0]], [[1.0]])
    check(structural and abscissa < 0, "hurwitz verdict")

    demo = pdflow.run_distributed(
        agent_kinds=["quadratic", "quadratic", "quadratic"],
        agent_params=[-1.0, 2.0, 2.0],
        x0=[1.0, 2.0, 3.0],
        alpha=3.0,
        sum_mu=3.0,
        horizon=100.0,
    )
    check(demo["consensus_error"] <= 1e-6, f"consensus {demo['consensus_error']:.2e}")
    check(demo["r_squared"] >= 0.99, f"distributed tail fit r2 {demo['r_squared']:.4f}")

    rsi = pdflow.run_distributed(
        agent_kinds=["quadratic", "sin_squared"],
        agent_params=[2.0, 3.0],
        x0=[3.0, -2.0],
        sum_mu=0.69,
        sum_rsi=True,
        horizon=20.0,
    )
    check(max(abs(v) for v in rsi["x_final"]) <= 1e-6, "rsi split reaches the minimizer")

    print("all smoke tests passed")


if __name__ == "__main__":
    main()

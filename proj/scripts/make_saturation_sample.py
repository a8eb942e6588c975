#!/usr/bin/env python3
"""Regenerate scenarios/saturation_sample.csv.

Synthetic saturation measurement: rate(E) = R0 * rho(E) + alpha * E with
R0 = 10200 counts/s, E_sat = 0.05 pJ, alpha = 5.5 counts/s/pJ,
tau_p = 13 ps, tau_r = 10 ns, Poisson counting noise at 10 s per point.
"""

import math
import pathlib

import numpy as np

R0 = 10200.0
E_SAT = 0.05
ALPHA = 5.5
TAU_P = 13e-12
TAU_R = 10e-9
INTEGRATION_S = 10.0
SEED = 20240611


def rho(e_pj: float) -> float:
    x = e_pj / E_SAT
    return x / (1.0 + x) * -math.expm1(-(TAU_P / TAU_R) * (1.0 + x))


def main() -> None:
    rng = np.random.default_rng(SEED)
    energies = np.logspace(math.log10(0.5), math.log10(200.0), 25)
    lines = ["# synthetic saturation measurement; see scripts/make_saturation_sample.py",
             "E_p_pJ,rate_cps,weight"]
    for e in energies:
        mean_rate = R0 * rho(e) + ALPHA * e
        counts = rng.poisson(mean_rate * INTEGRATION_S)
        rate = counts / INTEGRATION_S
        weight = 1.0 / max(rate, 1.0)
        lines.append(f"{e:.6g},{rate:.6g},{weight:.6g}")
    out = pathlib.Path(__file__).resolve().parent.parent / "scenarios" / "saturation_sample.csv"
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()

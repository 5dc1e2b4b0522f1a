"""Empirical RK4 order on the EV subsystem: end-state error against a fine-step reference.

Shows where truncation error dominates and where float64 roundoff takes over.
"""
import numpy as np

from evslv import IntegratorConfig, ModelSpec3, simulate


def final(spec, dt, T):
    return simulate(spec, (0.1, 0.1, 0.0), IntegratorConfig(dt=dt, horizon=T, record_stride=10**9)).final


def main(T=1.0, ref_dt=1e-5):
    spec = ModelSpec3.baseline(0.1)
    ref = final(spec, ref_dt, T)
    prev = None
    print(f"{'dt':>10} {'error':>12} {'ratio':>8}")
    for dt in (0.5, 0.25, 0.125, 0.0625, 0.03125, 0.01, 0.005):
        err = float(np.max(np.abs(final(spec, dt, T) - ref)))
        ratio = "" if prev is None else f"{prev / err:8.2f}"
        print(f"{dt:10.5f} {err:12.3e} {ratio}")
        prev = err


if __name__ == "__main__":
    main()

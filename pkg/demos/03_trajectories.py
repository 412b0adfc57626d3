"""Simulate credibility trajectories and the construct-to-commitment transition.

A noiseless path shows the geometric approach to the steady state; a noisy
ensemble shows the cross-path distribution, skeptic extinction, and when the
institutionalization stock triggers the commitment floor.
"""

from pathlib import Path

import numpy as np

from ncc import (
    PolicyAction,
    detect_commitment_transition,
    simulate_ensemble,
    simulate_path,
    steady_state_credibility,
)
from ncc.fixtures import baseline_params

OUT = Path(__file__).parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    action = PolicyAction(p=0.9, m=0.7)

    print("=== noiseless path: geometric convergence ===")
    # accrual threshold below the steady state so institutionalization builds
    quiet = baseline_params(sigma_eps=0.0, sigma_nu=0.0, theta_threshold=0.3, l_threshold=1.0)
    traj = simulate_path(action, quiet, 40, seed=7, theta0=0.05, omega0=0.3,
                         kappa_mode="fixed", kappa_fixed=1.2)
    target = steady_state_credibility(action, 1.2, quiet)
    print(f"steady state c*p = {target:.4f}")
    for t in (1, 2, 3, 5, 10, 20, 40):
        print(f"  period {t:2d}: theta={traj.theta[t - 1]:.4f} omega={traj.omega[t - 1]:.3f} "
              f"L={traj.l[t - 1]:.3f} committed={bool(traj.commitment_active[t - 1])}")
    hit = detect_commitment_transition(traj, quiet)
    print(f"commitment floor activates at period {hit}")

    print("\n=== noisy ensemble: 2000 paths ===")
    params = baseline_params(theta_threshold=0.3, l_threshold=1.0)
    stats = simulate_ensemble(action, params, 80, 2000, base_seed=42,
                              theta0=0.05, omega0=0.3)
    expect = steady_state_credibility(action, None, params)
    for t in (1, 10, 20, 40, 80):
        print(f"  period {t:2d}: mean theta={stats.theta_mean[t - 1]:.4f} "
              f"(sd {np.sqrt(stats.theta_var[t - 1]):.4f})  mean omega={stats.omega_mean[t - 1]:.4f}  "
              f"mean L={stats.l_mean[t - 1]:.3f}")
    print(f"cost-averaged steady state: {expect:.4f}")
    print("transition-time summary:", stats.transition_summary())

    traj.to_csv(OUT / "trajectory.csv")
    stats.to_csv(OUT / "ensemble.csv")
    print(f"\nwrote {OUT / 'trajectory.csv'} and {OUT / 'ensemble.csv'}")


if __name__ == "__main__":
    main()

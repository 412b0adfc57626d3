"""Walk through one period of the narrative-credibility game.

Shows how the ideal execution consistency responds to narrative precision,
monitoring, execution cost and the commitment floor; how market beliefs chase
the execution signal; and how aggregate investment splits across believer,
rational and skeptic groups.
"""

from ncc import (
    EconState,
    PolicyAction,
    aggregate_investment,
    central_period_utility,
    local_best_response,
    mean_best_response,
    update_belief,
)
from ncc.fixtures import baseline_params


def main():
    params = baseline_params()
    action = PolicyAction(p=0.8, m=0.5)

    print("=== ideal execution consistency ===")
    print(f"controls: precision p={action.p}, monitoring m={action.m}, "
          f"penalty weight beta0+m={params.beta0 + action.m}")
    for kappa in (0.5, 1.0, 1.5, 2.0):
        c = local_best_response(params, action, kappa)
        floored = local_best_response(params, action, kappa, commitment_active=True)
        print(f"  execution cost kappa={kappa:4.1f}: c* = {c:.4f}"
              f"   (with commitment floor {params.c_min}: {floored:.4f})")
    avg = mean_best_response(params, action)
    print(f"  averaged over kappa ~ U[{params.kappa_lo}, {params.kappa_hi}]: {avg:.4f}")

    print("\n=== belief dynamics toward the execution signal c*p ===")
    c_star = local_best_response(params, action, 1.0)
    signal = c_star * action.p
    theta = 0.1
    print(f"signal c*p = {signal:.4f}, updating speed eta = {params.eta}")
    for t in range(1, 9):
        theta = update_belief(theta, c_star, action, params, eps=0.0)
        print(f"  period {t}: theta = {theta:.4f}")

    print("\n=== investment composition along the belief path ===")
    omega = 0.3
    for theta in (0.1, 0.3, 0.5):
        state = EconState(theta=theta, l=0.5, omega=omega)
        inv = aggregate_investment(state, action, params)
        u = central_period_utility(state, action, params)
        print(f"  theta={theta:.1f} omega={omega:.2f}: believers {inv.i_b:.3f} + "
              f"rationals {inv.i_r:.3f} + skeptics {inv.i_s:.3f} = {inv.i_total:.3f}"
              f"   central payoff {u:.4f}")
        omega = max(omega - 0.1, 0.0)  # skeptics thin out as execution persists


if __name__ == "__main__":
    main()

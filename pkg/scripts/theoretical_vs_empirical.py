"""Asymptotic power formula against simulated power for dense alternatives.

Every coordinate carries the shift theta * sigma_jj, with theta chosen so that
Delta^T Delta / sqrt(p) hits each requested value.
"""

import argparse
import math

from hdmt.datagen import CovarianceSpec
from hdmt.dlrt import theoretical_power
from hdmt.simharness import ExperimentGrid, run_grid
from hdmt.specfun import null_moments


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--p", type=int, default=500)
    ap.add_argument("--targets", type=float, nargs="+", default=[0.5, 1.0, 1.5, 2.0, 3.0, 4.0])
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--replicates", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int)
    args = ap.parse_args()

    n, p = args.n, args.p
    scale = n * n / (2 * n)
    tau_sq = null_moments(2 * n, 2 * n - 2).var_u
    print("target,theta,theory,empirical,mc_stderr")
    for target in args.targets:
        theta = math.sqrt(target * math.sqrt(p) / (p * scale))
        theory = theoretical_power(p * scale * theta**2, p, tau_sq, args.alpha)
        grid = ExperimentGrid(n1=n, n2=n, p=p, structure=CovarianceSpec(p=p), betas=(1.0,), theta=theta,
                              alpha=args.alpha, replicates=args.replicates, master_seed=args.seed)
        row = run_grid(grid, args.threads)[0]
        print(f"{target:.3f},{theta:.5f},{theory:.4f},{row.rejection_rate:.4f},{row.mc_stderr:.4f}")


if __name__ == "__main__":
    main()

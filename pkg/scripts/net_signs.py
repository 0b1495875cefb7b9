"""Print CCC_net per variable for every built-in system, plus a sweep over master ICs.

    python scripts/net_signs.py [--ics 6] [--seed 0]
"""

import argparse

import numpy as np

from causync.ccc import DEFAULT_PARAMS, ccc_matrix
from causync.dynsys import SYSTEM_NAMES, DivergenceError, builtin_system, integrate


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--ics", type=int, default=6, help="number of perturbed master ICs")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    for name in SYSTEM_NAMES:
        s = builtin_system(name)
        params = DEFAULT_PARAMS[name]
        nets = []
        for i in range(args.ics):
            ic = np.asarray(s.default_ic) + (0 if i == 0 else rng.uniform(-0.1, 0.1, s.dimension))
            try:
                tr = integrate(s, tuple(ic), 8000, 2000)
            except DivergenceError:
                continue
            nets.append(ccc_matrix(tr, params).net())
        nets = np.array(nets)
        print(f"{name}  ({len(nets)} ICs, params {params.as_tuple()})")
        for j, v in enumerate(s.variable_names):
            col = nets[:, j]
            print(f"  {v}: default {col[0]:+.4f}   mean {col.mean():+.4f}   sd {col.std():.4f}")


if __name__ == "__main__":
    main()

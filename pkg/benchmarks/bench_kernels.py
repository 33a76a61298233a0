"""Compare the pure-numpy and compiled kernel backends.

Times the three hot loops (single collision, full trajectory, fixed-point
iteration) plus the Hermitian trace norm across system dimensions, checks
that both backends produce the same numbers, and prints a speedup table.

Run:  python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from mediahom import network, qmath
from mediahom._kernels import _pure
from mediahom.collision import build_channel

try:
    from mediahom._kernels import _compiled
except ImportError:
    _compiled = None


def chain_channel(n_sites, rng):
    """End-coupled swap chain: the workload every scenario runs."""
    spec = network.NetworkSpec(network.chain_graph(n_sites))
    h_sys = network.system_hamiltonian(spec)
    dims = [2] * (n_sites + 1)
    h_int = network.interaction_hamiltonian(dims, [(n_sites, n_sites - 1)])
    return build_channel(h_sys, h_int, qmath.random_density(2, rng), 0.5)


def timeit(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repetitions, best-of (default 5)")
    args = parser.parse_args()

    if _compiled is None:
        print("compiled backend not built; nothing to compare")
        return

    rng = np.random.default_rng(42)
    rows = []
    for n_sites in (2, 3, 4, 5):
        ch = chain_channel(n_sites, rng)
        kraus = ch.kraus_operators()
        d = ch.system_dim
        rho = qmath.random_density(d, rng)
        steps = 2000

        agree = np.abs(
            _pure.trajectory(kraus, rho, 50)
            - _compiled.trajectory(kraus, rho, 50)
        ).max()

        for label, call in (
            ("apply", lambda b: b.apply_kraus(kraus, rho)),
            ("trajectory", lambda b: b.trajectory(kraus, rho, steps)),
            ("iterate", lambda b: b.iterate_until(kraus, rho, 1e-12, steps)),
            ("trace_norm", lambda b: b.hermitian_trace_norm(rho)),
        ):
            t_pure = timeit(lambda: call(_pure), args.repeats)
            t_comp = timeit(lambda: call(_compiled), args.repeats)
            rows.append((d, label, t_pure, t_comp, t_pure / t_comp, agree))

    print(f"{'dim':>4} {'kernel':<11} {'pure (s)':>10} {'compiled (s)':>13} "
          f"{'speedup':>8} {'max |diff|':>11}")
    for d, label, t_pure, t_comp, speedup, agree in rows:
        print(f"{d:>4} {label:<11} {t_pure:>10.3e} {t_comp:>13.3e} "
              f"{speedup:>7.1f}x {agree:>11.1e}")


if __name__ == "__main__":
    main()

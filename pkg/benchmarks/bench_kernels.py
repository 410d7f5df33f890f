"""Compare the pure-Python and compiled kernels on the two hot loops:
permutation-orbit canonicalization (census work) and single-token circuit
propagation.  Run:  python benchmarks/bench_kernels.py
"""

import random
import time
from array import array

from rlemkit.kernels import pure

try:
    from rlemkit.kernels import _speed
except ImportError:
    _speed = None


def bench(label, fn, repeat=3):
    best = min(_timed(fn) for _ in range(repeat))
    print(f"  {label:<14} {best * 1000:9.1f} ms")
    return best


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def orbit_workload(mod):
    rng = random.Random(1)
    tables = []
    for _ in range(200):
        e = list(range(8))
        rng.shuffle(e)
        tables.append(tuple(e))

    def run():
        for e in tables:
            mod.orbit_serials(e, 4)
    return run


def token_workload(mod):
    from rlemkit.turing import PARITY, compile_to_re
    compiled = compile_to_re(PARITY, 8)
    net = compiled.netlist
    packed = net._packed()
    base = packed.states_of(compiled.initial_configuration("1111"))
    begin = packed.in_id["begin"]

    def run():
        for _ in range(40):
            states = array("q", base)
            out, steps = mod.run_token(packed.arrays, states, begin, 10 ** 6)
            assert out >= 0
    return run


def rank_workload(mod):
    rng = random.Random(2)
    perms = []
    for _ in range(5000):
        e = list(range(8))
        rng.shuffle(e)
        perms.append(tuple(e))

    def run():
        for e in perms:
            mod.rank_permutation(e)
    return run


def main():
    print("workloads: 200 orbit closures (k=4), 40 parity-machine runs on "
          "the window-8 rotary circuit, 5000 Lehmer ranks (n=8)")
    results = {}
    for name, builder in (("orbit", orbit_workload),
                          ("token", token_workload),
                          ("rank", rank_workload)):
        print(f"{name}:")
        t_pure = bench("pure", builder(pure))
        results[name] = [t_pure, None]
        if _speed is not None:
            t_fast = bench("compiled", builder(_speed))
            results[name][1] = t_fast
            print(f"  {'speedup':<14} {t_pure / t_fast:9.1f} x")
        else:
            print("  compiled kernel not built (pip install -e . without "
                  "RLEMKIT_PURE)")


if __name__ == "__main__":
    main()

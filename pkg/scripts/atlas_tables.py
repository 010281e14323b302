"""Tables of the worked derivatives: partition complexes, Lie(n), the cyclic-sphere
coefficient and circle configuration spaces."""
import argparse

from taylortower.atlas import (a_theory_coefficient, compare_partition_lie, config_compactified,
                               lie_module, partition_complex)
from taylortower.homology import homology
from taylortower.linalg import QQ
from taylortower.representations import character
from taylortower.simplicial import circle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=5)
    args = ap.parse_args()
    print(f"{'n':>2}  {'partition':<16} {'Lie(n)':<8} {'twist=Lie':<10} {'cyclic sphere':<16}")
    for n in range(2, args.max_n + 1):
        P = homology(partition_complex(n).complex).describe()
        L = lie_module(n).rank()
        ok = compare_partition_lie(n)["ok"] if n <= 4 else "-"
        A = homology(a_theory_coefficient(n).complex).describe()
        print(f"{n:>2}  {P:<16} {L:<8} {str(ok):<10} {A:<16}")
    print()
    for based in (True, False):
        for n in (1, 2, 3):
            r = config_compactified(circle(), n, based, QQ)
            chi = character(r)
            print(f"circle, n={n}, based={based}: {homology(r.complex).describe()}  "
                  f"characters {chi.to_json()['per_degree']}")


if __name__ == "__main__":
    main()

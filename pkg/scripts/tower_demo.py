"""Print the Taylor tower of a few polynomial functors at S^0 and S^1."""
import argparse

from taylortower.chain import sphere
from taylortower.functors import Id, Sum, TensorPower, TruncTensorAlg
from taylortower.tower import layer_D, taylor_P

FUNCTORS = {
    "X^2": TensorPower(2),
    "X + X^2": Sum((Id(), TensorPower(2))),
    "TTA(3)": TruncTensorAlg(3),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--top", type=int, default=3, help="highest tower level")
    ap.add_argument("--model", default="coefficient", choices=("coefficient", "generic"))
    args = ap.parse_args()
    for name, F in FUNCTORS.items():
        for k in (0, 1):
            X = sphere(k)
            print(f"{name} at S^{k}")
            for n in range(args.top + 1):
                rep = taylor_P(F, n, X, model=args.model)
                final = rep.final.describe() if rep.final is not None else "-"
                line = f"  P_{n}: {rep.verdict:<20} iterations={rep.iterations}  {final}"
                if n >= 1 and rep.stable_level is not None:
                    line += f"   D_{n}: {layer_D(F, n, X, model=args.model).homology.describe()}"
                print(line)


if __name__ == "__main__":
    main()

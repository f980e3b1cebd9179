"""Graph-evolution defect under joint grid and time-step refinement."""
import argparse
import sys
from dataclasses import replace

from weakkam_ot.action import FREE, PENDULUM
from weakkam_ot.fixtures import sine
from weakkam_ot.singular import arnaud_graph_check
from weakkam_ot.space_core import TorusGrid


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=float, default=0.05)
    ap.add_argument("--amplitude", type=float, default=0.05)
    ap.add_argument("--sizes", default="32,64,128")
    args = ap.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]
    print("model,n,dt,defect,ratio")
    for name, model in (("free", FREE), ("pendulum", PENDULUM)):
        prev = None
        for n in sizes:
            dt = 1e-3 * 64 / n
            g = TorusGrid(1, n)
            d = arnaud_graph_check(replace(model, dt=dt), g, sine(g, args.amplitude), args.t).defect
            ratio = "" if prev is None else f"{d / prev:.3f}"
            print(f"{name},{n},{dt:g},{d:.6f},{ratio}", flush=True)
            prev = d
    return 0


if __name__ == "__main__":
    sys.exit(main())

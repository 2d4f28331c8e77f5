"""Inference error of the local-measurement attack over a grid of bases.

The basis is |n1> = cos(t)|0> + e^{i phi} sin(t)|1>.  Each row gives the
closed form, the eight-challenge sum and the misidentification rate of the
simulated attack, which should all agree and never drop below 1/4.
"""
import argparse
import cmath
import math

import numpy as np

from qpv.analysis import inference_error, inference_error_by_states, simulated_inference_error


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=5)
    args = parser.parse_args()
    print(f"{'t':>7s} {'phi':>7s} {'closed':>9s} {'summed':>9s} {'simulated':>9s}")
    for t in np.linspace(0, math.pi / 2, args.steps):
        for phi in np.linspace(0, math.pi, args.steps):
            a, b = math.cos(t), math.sin(t) * cmath.exp(1j * phi)
            print(
                f"{t:7.3f} {phi:7.3f} {inference_error(a, b):9.6f} "
                f"{inference_error_by_states(a, b):9.6f} {simulated_inference_error(a, b):9.6f}"
            )


if __name__ == "__main__":
    main()

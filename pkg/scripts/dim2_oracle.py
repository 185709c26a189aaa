"""Quadrature oracle for the qubit frame function (1 + n_z^3)/2.

Computes the population RMS residual of its best affine fit on the Bloch
sphere, the lower bound used by the tests for a fit on K sampled contexts,
and compares with seeded sample fits.

    python3 scripts/dim2_oracle.py --contexts 200 --trials 20
"""

from __future__ import annotations

import argparse

import numpy as np

from bornlab.gleason import bloch_frame, fit_density, frame_samples, sample_contexts
from bornlab.numerics import RngStream


def oracle(nz: int = 40, nphi: int = 64) -> tuple[float, float]:
    """(RMS residual, fourth moment of the residual) by Gauss-Legendre x uniform-phi quadrature."""
    z, wz = np.polynomial.legendre.leggauss(nz)
    phi = np.linspace(0, 2 * np.pi, nphi, endpoint=False)
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    w = (np.repeat(wz[:, None], nphi, axis=1) / (2 * nphi)).ravel()
    r = np.sqrt(1 - zz**2)
    n = np.stack([r * np.cos(pp), r * np.sin(pp), zz], axis=-1).reshape(-1, 3)
    f = 0.5 * (1 + n[:, 2] ** 3)
    design = np.column_stack([np.ones(len(n)), n])
    sw = np.sqrt(w)
    coef = np.linalg.lstsq(design * sw[:, None], f * sw, rcond=None)[0]
    res = f - design @ coef
    return float(np.sqrt(np.sum(w * res**2))), float(np.sum(w * res**4))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--contexts", type=int, default=200)
    parser.add_argument("--trials", type=int, default=20)
    args = parser.parse_args()

    rms, m4 = oracle()
    k = args.contexts
    spread = np.sqrt((m4 - rms**4) / k) / (2 * rms)
    bound = rms * np.sqrt(1 - 4 / (2 * k)) - 5 * spread
    print(f"oracle RMS residual     {rms:.12f}  (1/sqrt(175) = {1 / np.sqrt(175):.12f})")
    print(f"sampling SD, K={k:<5}   {spread:.6f}")
    print(f"lower bound, K={k:<5}   {bound:.6f}")
    fits = [
        fit_density(frame_samples(bloch_frame(), sample_contexts(2, k, RngStream(t))), 2).raw_residual
        for t in range(args.trials)
    ]
    print(f"sample fits ({args.trials} seeds) min {min(fits):.4f}  mean {np.mean(fits):.4f}  max {max(fits):.4f}")


if __name__ == "__main__":
    main()

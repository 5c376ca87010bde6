"""Moments of Weyl-type sums for f(X) = X^d.

Even moments over the reals are exact solution counts; the mod p version is
checked against the explicit exponential-sum grid; log-log slopes are fitted
against the predicted growth.
"""
from matcount.momentlab import even_moment_I, j_moment_grid, moment_J, slope_estimate
from matcount.polycore import IntPoly


def main():
    X = IntPoly.x()
    print("I_4(X, H) against the closed form (2H+1)(2(2H+1)^2+1)/3:")
    for H in (1, 5, 25):
        N = 2 * H + 1
        print(f"  H={H}: {even_moment_I(X, H, 4).value} vs {N * (2 * N * N + 1) // 3}")

    f = IntPoly.monomial(2)
    print("\nJ_4(X^2, H, 101), exact count vs floating grid:")
    for H in (5, 20, 50):
        exact = moment_J(f, H, 101, 4).value
        grid, _ = j_moment_grid(f, H, 101, 4)
        print(f"  H={H}: {exact} vs {grid:.6f}")

    cube = IntPoly.monomial(3)
    pts = [(H, int(even_moment_I(cube, H, 4).value)) for H in (256, 512, 1024, 2048)]
    print(f"\nslope of log I_4(X^3, H): {slope_estimate(pts):.4f} (bound 2 + o(1))")


if __name__ == "__main__":
    main()

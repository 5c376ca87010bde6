"""Predicted exponents of every rank-counting bound at one shape.

Shows the exact rational exponents at (d, m, n, r) = (3, 5, 5, 4) and how the
two readings of s_t change the polynomial-entry exponent.
"""
from matcount.exponents import delta_exponent, exponent_table, s_param


def main():
    print("s_t, tabulated reading:", [str(s_param(t, 3)) for t in range(3, 12)])
    print("s_t, integer reading:  ", [str(s_param(t, 3, "integer")) for t in range(3, 12)])
    print()
    for name, pred, note in exponent_table(3, 5, 5, 4):
        if pred is None or pred.selected is None:
            print(f"  {name:<14} -- {note or 'needs H and p'}")
        else:
            print(f"  {name:<14} H^{pred.selected.h_exp}")
    print(f"\nDelta(3,5,5,4): table {delta_exponent(3, 5, 5, 4)}, "
          f"integer {delta_exponent(3, 5, 5, 4, mode='integer')}")


if __name__ == "__main__":
    main()

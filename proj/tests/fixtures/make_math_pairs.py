#!/usr/bin/env python3
"""Builds math_pairs.json: candidate/gold pairs with equivalence verdicts
computed by sympy, used as the independent oracle for the default
math-equivalence checker."""

import json
import sympy
from sympy.parsing.latex import parse_latex  # noqa: F401  (not all pairs need it)


def sympy_equal(a: str, b: str) -> bool:
    ea = sympy.sympify(a, rational=True)
    eb = sympy.sympify(b, rational=True)
    return sympy.simplify(ea - eb) == 0


# (candidate, gold, sympy-readable candidate, sympy-readable gold)
RAW_PAIRS = [
    ("42", "42", "42", "42"),
    ("42", "43", "42", "43"),
    ("0.5", "1/2", "0.5", "1/2"),
    ("\\frac{1}{2}", "0.5", "1/2", "0.5"),
    ("\\frac{3}{4}", "0.75", "3/4", "0.75"),
    ("\\frac{2}{3}", "0.667", "2/3", "0.667"),
    ("-\\frac{1}{4}", "-0.25", "-1/4", "-0.25"),
    ("\\dfrac{5}{8}", "0.625", "5/8", "0.625"),
    ("\\tfrac{7}{2}", "3.5", "7/2", "3.5"),
    ("  12  ", "12", "12", "12"),
    ("$18$", "18", "18", "18"),
    ("$$-7$$", "-7", "-7", "-7"),
    ("\\boxed{99}", "99", "99", "99"),
    ("\\(0.125\\)", "1/8", "0.125", "1/8"),
    ("\\[250\\]", "250", "250", "250"),
    ("3.14159", "3.14159", "3.14159", "3.14159"),
    ("3.14159", "3.1416", "3.14159", "3.1416"),
    ("1e3", "1000", "1e3", "1000"),
    ("2.5e-1", "0.25", "2.5e-1", "0.25"),
    ("-0", "0", "-0", "0"),
    ("100", "100.0", "100", "100.0"),
    ("7/14", "1/2", "7/14", "1/2"),
    ("10/4", "2.5", "10/4", "2.5"),
    ("-3/6", "-0.5", "-3/6", "-0.5"),
    ("\\frac{10}{5}", "2", "10/5", "2"),
    ("\\frac{1}{3}", "0.3333333333333333", "1/3", "0.3333333333333333"),
    ("\\frac{1}{3}", "0.333", "1/3", "0.333"),
    ("0.1", "1/10", "0.1", "1/10"),
    ("480", "480.", "480", "480."),
    ("{256}", "256", "256", "256"),
    ("6", "-6", "6", "-6"),
    ("0.0001", "1/10000", "0.0001", "1/10000"),
    ("x + 1", "x+1", "x + 1", "x+1"),
    ("1/7", "0.142857142857", "1/7", "0.142857142857"),
    ("8", "8.000000001", "8", "8.000000001"),
    ("8", "8.0000000000001", "8", "8.0000000000001"),
    ("\\frac{22}{7}", "3.142857142857143", "22/7", "3.142857142857143"),
    ("-1", "1", "-1", "1"),
    ("\\frac{9}{12}", "\\frac{3}{4}", "9/12", "3/4"),
    ("\\frac{6}{4}", "1.5", "6/4", "1.5"),
    ("11/11", "1", "11/11", "1"),
    ("0", "0.0", "0", "0.0"),
    ("123456789", "123456789", "123456789", "123456789"),
    ("123456789", "123456788", "123456789", "123456788"),
    ("$\\frac{5}{2}$", "2.5", "5/2", "2.5"),
    ("17.25", "69/4", "17.25", "69/4"),
    ("-\\frac{8}{2}", "-4", "-8/2", "-4"),
    ("3.0e2", "300", "3.0e2", "300"),
    ("0.2", "2/10", "0.2", "2/10"),
    ("{0.75}", "\\frac{3}{4}", "0.75", "3/4"),
]


def main() -> None:
    pairs = []
    for candidate, gold, sa, sb in RAW_PAIRS:
        equivalent = sympy_equal(sa, sb)
        # sympy treats decimal literals exactly; apply the checker's 1e-9
        # absolute tolerance so the oracle matches the documented contract.
        if not equivalent:
            try:
                fa = float(sympy.sympify(sa, rational=True))
                fb = float(sympy.sympify(sb, rational=True))
                if abs(fa - fb) <= 1e-9:
                    equivalent = True
            except (TypeError, ValueError):
                pass
        pairs.append({"candidate": candidate, "gold": gold, "equivalent": equivalent})
    assert len(pairs) == 50, len(pairs)
    with open("math_pairs.json", "w") as fh:
        json.dump(pairs, fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(pairs)} pairs; {sum(p['equivalent'] for p in pairs)} equivalent")


if __name__ == "__main__":
    main()

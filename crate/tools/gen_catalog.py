#!/usr/bin/env python3
"""Regenerate the shipped fusion tables in crates/core/data/."""

import json
import os
from fractions import Fraction
from math import gcd

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "data")


def frac(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def su2(p, a, b, c):
    """Fusion of su(2) at level p - 2 in 1-based labels."""
    if (a + b + c) % 2 == 0:
        return 0
    return int(abs(a - b) + 1 <= c <= min(a + b - 1, 2 * p - a - b - 1))


def minimal(p, q):
    def canon(m, n):
        return min((m, n), (p - m, q - n))

    reps = sorted({canon(m, n) for m in range(1, p) for n in range(1, q)})
    name = {r: f"phi_{r[0]}_{r[1]}" for r in reps}
    labels = [name[r] for r in reps]
    weights = {
        name[(m, n)]: frac(Fraction((n * p - m * q) ** 2 - (p - q) ** 2, 4 * p * q))
        for (m, n) in reps
    }
    fusion = []
    for a in reps:
        for b in reps:
            for c in reps:
                mult = su2(p, a[0], b[0], c[0]) * su2(q, a[1], b[1], c[1]) + su2(
                    p, a[0], b[0], p - c[0]
                ) * su2(q, a[1], b[1], q - c[1])
                if mult:
                    fusion.append([name[a], name[b], name[c], mult])
    aliases = {"V": "phi_1_1"}
    if (p, q) == (2, 5):
        aliases["X"] = "phi_1_2"
    if (p, q) == (3, 4):
        aliases.update({"sigma": "phi_1_2", "epsilon": "phi_1_3"})
    return {
        "labels": labels,
        "vacuum": "phi_1_1",
        "dual": [],
        "central_charge": frac(1 - Fraction(6 * (p - q) ** 2, p * q)),
        "weights": weights,
        "fusion": fusion,
        "aliases": aliases,
        "provenance": f"Virasoro minimal model ({p},{q}); fusion from the su(2) product rule; "
        "all modules self-contragredient",
    }


def sl2(level):
    labels = [str(a) for a in range(level + 1)]
    fusion = []
    for a in range(level + 1):
        for b in range(level + 1):
            for c in range(level + 1):
                if (a + b + c) % 2 == 0 and abs(a - b) <= c <= min(a + b, 2 * level - a - b):
                    fusion.append([str(a), str(b), str(c), 1])
    return {
        "labels": labels,
        "vacuum": "0",
        "dual": [],
        "central_charge": frac(Fraction(3 * level, level + 2)),
        "weights": {str(a): frac(Fraction(a * (a + 2), 4 * (level + 2))) for a in range(level + 1)},
        "fusion": fusion,
        "aliases": {"V": "0"},
        "provenance": f"affine sl2 at level {level}; weights from the Sugawara construction, "
        "external to the factorization data; all modules self-contragredient",
    }


def main():
    os.makedirs(OUT, exist_ok=True)
    for p in range(2, 41):
        for q in range(p + 1, 41):
            if p * q <= 40 and gcd(p, q) == 1:
                write(f"virasoro_{p}_{q}.json", minimal(p, q))
    for level in range(1, 9):
        write(f"sl2_{level}.json", sl2(level))


def write(name, doc):
    lines = []
    for key, value in doc.items():
        if key == "fusion":
            rows = ",\n".join("  " + json.dumps(r) for r in value)
            lines.append(f' "fusion": [\n{rows}\n ]')
        else:
            lines.append(f" {json.dumps(key)}: {json.dumps(value)}")
    with open(os.path.join(OUT, name), "w") as f:
        f.write("{\n" + ",\n".join(lines) + "\n}\n")


if __name__ == "__main__":
    main()

"""Small CSV/text helpers with deterministic float formatting."""

import numpy as np


def fmt(x):
    """Shortest round-trip decimal form; deterministic for identical floats."""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path, header, rows, comments=()):
    """Write rows of mixed scalars with a fixed header; '#' comment lines
    may precede the header."""
    with open(path, "w") as f:
        for line in comments:
            f.write(f"# {line}\n")
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(fmt(v) for v in row) + "\n")

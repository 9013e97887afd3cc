"""Smoke test for the paircoh_py extension.

Build it first, for example:

    cargo build --release -p paircoh-py
    cp target/release/libpaircoh_py.so python/paircoh_py.so
    python3 python/smoke_test.py
"""

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import paircoh_py as pc  # noqa: E402


def close(a, b, tol):
    return abs(a - b) <= tol


def max_dev(a, b):
    return max(abs(x - y) for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def main():
    vac = pc.PairCoherentState(0.0, 0.0, 0)
    assert vac.spectrum() == (0.5, 0.5)
    assert not vac.is_squeezed()

    s = pc.PairCoherentState(1.0, 0.5, 2)
    n1, n2 = s.photon_numbers()
    assert close(n1 - n2, 2.0, 1e-10)

    lo, hi = s.spectrum()
    evals, _ = pc.sym_eigen(s.variance_matrix())
    assert all(close(e, w, 1e-10) for e, w in zip(evals, [lo, lo, hi, hi]))

    v_num, _ = s.numeric_moments()
    assert max_dev(v_num, s.variance_matrix()) <= 1e-8

    r, d = s.diagonalize()
    assert pc.is_orthogonal(r)
    assert max(abs(d[i][j]) for i in range(4) for j in range(4) if i != j) <= 1e-10

    assert pc.uncertainty_margin(s.variance_matrix()) >= -1e-10
    assert pc.is_symplectic(pc.rotation_r2(0.3))
    assert not pc.is_symplectic(pc.rotation_r1(math.pi / 8))

    report = s.analyze()
    assert report["squeezed"] == s.is_squeezed()
    assert close(s.leading_u2_transform()["value"], lo, 1e-9)
    assert s.leading_position_transform()["value"] >= lo - 1e-12

    try:
        pc.PairCoherentState(0.0, 0.0, -1)
    except pc.DomainError:
        pass
    else:
        raise AssertionError("negative q accepted")

    print("paircoh_py smoke test: ok", report)


if __name__ == "__main__":
    main()

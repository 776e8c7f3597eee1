"""Smoke test for the f2q Python bindings.

Build and install first:
    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/f2q-*.whl
"""

import math

import f2q


def main():
    lat = f2q.Lattice(2, 2)
    assert (lat.lx, lat.ly, lat.rho, lat.n_qubits) == (2, 2, 1, 8)
    assert len(lat.edges()) == 8
    assert f2q.Lattice(3, 3).rho == -1

    try:
        f2q.Lattice(3, 4)
    except ValueError as e:
        assert "lattice" in str(e)
    else:
        raise AssertionError("3x4 accepted")

    vac = f2q.vacuum_circuit(f2q.Lattice(4, 4), pairs=[(0, 0, "x")])
    report = vac.constraint_report(f2q.Lattice(4, 4))
    assert len(report) == 24
    assert all(abs(v - t) < 1e-10 for _, v, t in report)

    text = f2q.trotter_step(lat, 1.0, 3.0, 0.1).to_text()
    back = f2q.Circuit.from_text(text)
    assert back.to_text() == text
    assert back.depth_report()["two_qubit_depth"] > 0

    ((sx, sy), dev) = f2q.spectrum_match(lat, 1.0, 2.0)
    assert dev < 1e-8, dev
    spectrum = f2q.ed_spectrum(lat, 1.0, 2.0, 2, (sx, sy))
    assert spectrum == sorted(spectrum)

    res = f2q.vqe(lat, 1.0, 2.0, ansatz="hv", layers=1, max_steps=50)
    assert res.final_energy >= res.exact_energy - 1e-9
    assert res.max_constraint_violation < 1e-10
    assert len(res.energies) == res.steps

    rows = f2q.quench(lat, 0.1, 0.2)
    assert len(rows) == 3 * 4
    for k in range(3):
        total = sum(r[3] for r in rows[4 * k:4 * k + 4])
        assert math.isclose(total, 2.0, abs_tol=1e-10)

    depths = {d for _, d, _, _ in f2q.depth_table([4, 6])}
    assert len(depths) == 1

    print("smoke test passed")


if __name__ == "__main__":
    main()

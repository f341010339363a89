"""Write the example input files under systems/.

Run from the repository root: ``python3 scripts/make_systems.py``.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from quantum_ifs import catalog, fileio
from quantum_ifs.spectral import embed_markov_kraus
from quantum_ifs.thermo import build_basic_from_classic

OUT = Path(__file__).resolve().parent.parent / "systems"

MARKOV_P = np.array([[0.8, 0.4], [0.2, 0.6]])
CLASSIC_A = np.log(np.array([[4.0, 1.0], [2.0, 1.0]]))
CLASSIC_Q = np.array([[0.7, 0.45], [0.3, 0.55]])


def write(name: str, obj) -> None:
    path = OUT / name
    path.write_text(fileio.dumps(obj))
    print(f"wrote {path.relative_to(OUT.parent)}")


def main() -> int:
    OUT.mkdir(exist_ok=True)
    write("four_branch_potential.json", fileio.system_to_json(catalog.four_branch_potential()))
    write("four_branch_potential_unitary.json",
          fileio.system_to_json(fileio.SystemFile(catalog.four_branch_potential_unitary(),
                                                  claims={"unitary": True})))
    write("three_branch.json", fileio.system_to_json(catalog.three_branch((0.5, 0.25, 0.25))))
    write("reflection_pair.json", fileio.system_to_json(catalog.reflection_pair()))
    write("reflection_pair_potential.json", fileio.system_to_json(
        catalog.reflection_pair().with_potentials([np.eye(2), np.diag([1.0, 2.0])])))
    write("phase_pair.json", fileio.system_to_json(
        fileio.SystemFile(catalog.phase_pair(0.3), claims={"cptp": True})))
    write("markov_kraus.json", fileio.system_to_json(
        fileio.SystemFile(embed_markov_kraus(MARKOV_P), claims={"cptp": True})))
    write("markov_p.json", {"matrix": fileio.real_matrix_to_json(MARKOV_P)})
    _, eta = catalog.markov_measure(MARKOV_P)
    write("markov_eta.json", fileio.measure_to_json(eta))
    classic = {"a": fileio.real_matrix_to_json(CLASSIC_A), "q": fileio.real_matrix_to_json(CLASSIC_Q)}
    write("classic_pair.json", classic)
    write("classic_bridge.json", fileio.system_to_json(
        fileio.SystemFile(build_basic_from_classic(CLASSIC_A, CLASSIC_Q), extra={"classic": classic})))
    write("cost_diag01.json", {"matrix": [[0, 0], [0, 1]]})
    eye = np.eye(2)
    collapse = [eye, [[1, 1], [0, 0]], [[0, 0], [1, 1]]]
    write("collapse_dynamics.json", {"dimension": 2, "branches": [{"v": np.asarray(v).tolist()} for v in collapse]})
    # branch 2 carries all the weight at |0><0| but annihilates it
    e00, e01, e11 = ([[1, 0], [0, 0]], [[0, 1], [0, 0]], [[0, 0], [0, 1]])
    write("degenerate.json", {"dimension": 2, "branches": [{"v": e00, "w": e11}, {"v": e01, "w": e00}]})
    return 0


if __name__ == "__main__":
    sys.exit(main())

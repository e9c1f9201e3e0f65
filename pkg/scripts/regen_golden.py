#!/usr/bin/env python3
"""Regenerate the bundled golden files under tests/golden.

Every serialized object and every CLI report here is expected to be
byte-stable; the regression suite reloads and re-runs all of them.
"""

import io as _io
import sys
from contextlib import redirect_stdout
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from koszulkit import complexes as cx
from koszulkit import descent as ds
from koszulkit import io as kio
from koszulkit.cli import main
from koszulkit.duality import ModulePresentation
from koszulkit.koszul import koszul
from koszulkit.matrices import Matrix
from koszulkit.rings import Zmod

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def run_cli_to(path, argv):
    out = _io.StringIO()
    with redirect_stdout(out):
        code = main(argv)
    path.write_text(out.getvalue())
    return code


def rel(argv):
    return [str(t) for t in argv]


def build():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    Z4 = Zmod(4)
    manifest = []

    K = koszul(Z4, [Z4.from_int(2)])
    kio.save(K, GOLDEN / "K4_on_2.kz")
    manifest.append("file: K4_on_2.kz")

    kio.save(K.complex, GOLDEN / "K4_on_2.cx")
    manifest.append("file: K4_on_2.cx")

    P = cx.make_complex(Z4, {0: 2, 1: 1, 2: 1}, {
        1: Matrix.from_rows(Z4, [[Z4.from_int(2)], [Z4.from_int(0)]]),
        2: Matrix.from_rows(Z4, [[Z4.from_int(2)]]),
    })
    kio.save(P, GOLDEN / "P.cx")
    manifest.append("file: P.cx")

    system = ds.generate_system(K, P)
    kio.save(system, GOLDEN / "S.sys")
    manifest.append("file: S.sys")

    sol = ds.canonical_solution(K, P)
    kio.save(sol, GOLDEN / "canonical.asg")
    manifest.append("file: canonical.asg")

    # a single-entry mutation that must be caught by S4
    mutated = dict(sol.values)
    var = ds.SystemVariable("Z", 1, 1, 1)
    mutated[var] = mutated[var] + Z4.from_int(1)
    kio.save(ds.Assignment(sol.hom, mutated), GOLDEN / "mutated.asg")
    manifest.append("file: mutated.asg")

    omega_ring = "polyquot coeff=F2 vars=x,y order=degrevlex ideal=[x^2, x*y, y^2]"
    from koszulkit.rings import make_ring, parse_element
    R = make_ring(omega_ring)
    x, y, z = parse_element(R, "x"), parse_element(R, "y"), R.zero
    omega = ModulePresentation(R, 2, Matrix.from_rows(R, [[y, z, x], [z, x, y]]))
    kio.save(omega, GOLDEN / "omega.pm")
    manifest.append("file: omega.pm")

    kfield = ModulePresentation(R, 1, Matrix.from_rows(R, [[x, y]]))
    kio.save(kfield, GOLDEN / "k.pm")
    manifest.append("file: k.pm")

    g = GOLDEN
    reports = [
        ("homology_K4.txt", ["complex", "homology", "K4_on_2.cx"]),
        ("verify_K4.txt", ["koszul", "verify", "K4_on_2.kz"]),
        ("verify_canonical.txt", ["system", "verify", "S.sys", "canonical.asg"]),
        ("verify_mutated.txt", ["system", "verify", "S.sys", "mutated.asg"]),
        ("sdc_omega.txt", ["sdc", "check", "--module", "omega.pm", "--window", "4"]),
        ("ext_k_k.txt", ["ext", "table", "-M", "k.pm", "-N", "k.pm", "--window", "4"]),
    ]
    for name, argv in reports:
        resolved = [str(g / t) if (g / t).exists() else t for t in argv]
        run_cli_to(g / name, resolved)
        manifest.append(f"report: {name} {' '.join(argv)}")

    (GOLDEN / "manifest.txt").write_text("\n".join(manifest) + "\n")
    print(f"wrote {len(manifest)} golden entries to {GOLDEN}")


if __name__ == "__main__":
    build()

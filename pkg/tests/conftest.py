import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from chainchaos import dc1, systems
from chainchaos.symbolic import ShiftPoint


@pytest.fixture(scope="session")
def fullshift_run():
    """The reference end-to-end run: full 2-shift, anchors 0^inf and 1^inf,
    r = 1/2, bit strings 0^10 and (01)^10, ten levels.  Returns the spec,
    anchors, schedule, certificate, and the wall-clock of the pipeline."""
    spec = systems.full_shift(2, 1)
    z = ShiftPoint((), (0,))
    w = ShiftPoint((), (1,))
    u = [0] * 10
    v = [i % 2 for i in range(10)]
    start = time.perf_counter()
    sched, cert = dc1.dc1_pipeline(spec, z, w, Fraction(1, 2), u, v, n_max=10)
    elapsed = time.perf_counter() - start
    return {"spec": spec, "z": z, "w": w, "u": tuple(u), "v": tuple(v),
            "sched": sched, "cert": cert, "elapsed": elapsed}


@pytest.fixture()
def doubling_cfg(tmp_path):
    path = tmp_path / "doubling.toml"
    path.write_text(
        'kind = "interval-pw-linear"\n\n'
        '[[piece]]\nfrom = "0"\nto = "1/2"\nslope = "2"\nintercept = "0"\n\n'
        '[[piece]]\nfrom = "1/2"\nto = "1"\nslope = "2"\nintercept = "-1"\n')
    return path


@pytest.fixture()
def identity_cfg(tmp_path):
    path = tmp_path / "identity.toml"
    path.write_text(
        'kind = "interval-pw-linear"\n\n'
        '[[piece]]\nfrom = "0"\nto = "1"\nslope = "1"\nintercept = "0"\n')
    return path


@pytest.fixture()
def fullshift_cfg(tmp_path):
    path = tmp_path / "fullshift.toml"
    path.write_text('kind = "sft"\ndepth = 1\nadjacency = [[1, 1], [1, 1]]\n')
    return path


@pytest.fixture()
def rotation_cfg(tmp_path):
    path = tmp_path / "rotation.toml"
    path.write_text('kind = "circle-affine"\na = 1\nb = "1/3"\n')
    return path

import runpy
from pathlib import Path

import pytest

NOTEBOOKS = Path(__file__).resolve().parents[1] / "notebooks"


# the training walkthrough is covered by the acceptance suite and takes a minute
@pytest.mark.parametrize("name", ["01_beamspace.py", "02_ray_tracing.py", "03_features_and_information.py"])
def test_notebook_runs(name, capsys):
    runpy.run_path(str(NOTEBOOKS / name), run_name="__main__")
    assert capsys.readouterr().out

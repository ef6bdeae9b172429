"""Attractive chemotaxis (scenario S2): small masses relax, large ones collapse.

Sweeps the initial mass of a Dirac start with chi = +1 and reports which runs
finish and which hit the concentration threshold. The regularization eps is
kept far below the concentration scale so saturation does not mask blow-up;
the bracket is grid-dependent, so treat it as an estimate, not the constant.
"""

import json
import tempfile
from pathlib import Path

from kslab import SimConfig
from kslab.runner import mass_sweep

workdir = Path(tempfile.mkdtemp(prefix="kslab_demo_"))
cells = 48
h = 1.0 / cells
config = SimConfig.from_dict(
    {
        "scenario": "S2",
        "domain": {"dim": 2, "lengths": [1.0, 1.0], "cells": [cells, cells]},
        "physics": {"chi": 1.0, "eps": 1e-5, "mollifier_eps": 0.02},
        "initial_measure": {"atoms": [{"position": [0.5, 0.5], "weight": 1.0}]},
        "time": {"T": 0.25, "dt_max": 1e-3},
        "blowup": {"linf_factor": 0.1 / h**2},
        "output": {"directory": str(workdir / "sweep")},
    }
)
report = mass_sweep(config, [4.0, 8.0, 16.0, 32.0, 64.0])
for outcome in report["outcomes"]:
    status = f"blow-up at t = {outcome['t_detect']:.3f}" if outcome["blowup"] else "completed"
    print(f"mass {outcome['mass']:6.2f}: {status}")
print(f"\nbracket: largest completing {report['largest_completing']}, "
      f"smallest blowing up {report['smallest_blowup']}")
print(report["caveat"])
